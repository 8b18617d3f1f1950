// Copyright 2026 The nemaudit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NEMAUDIT_SYNTH_H_
#define NEMAUDIT_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nemaudit/corpus.h"

namespace nemaudit {

// Desk-scale stand-in for the three corpora. Positive comments draw from a
// "transfer" style pool and mention frequent entities; group A (native) and
// the random negatives use a native pool; group B mixes both pools.
struct SynthConfig {
  std::uint64_t seed = 0;
  int suspect_comments = 300;
  int random_comments = 300;
  int group_a_comments = 200;
  int group_b_comments = 200;
  // Probability that a sentence mentions a frequent entity. Any sentence
  // mentions some entity with a fixed overall probability of 0.7.
  double entity_rate_pos = 0.6;
  double entity_rate_group_b = 0.4;
  double entity_rate_group_a = 0.2;
  // Share of group B style words taken from the positive pool.
  double style_overlap = 0.5;

  void Validate() const;
};

struct SynthCorpora {
  CommentCollection suspect;
  CommentCollection random_negative;
  CommentCollection evaluation;
  // Gazetteer lines covering every entity the generator can emit.
  std::string gazetteer_tsv;
  // Authors treated as already present elsewhere; ingest drops them.
  std::vector<std::string> existing_users;
};

SynthCorpora GenerateSynthetic(const SynthConfig& config);

// Raw export form (one JSON record per line, flair included) accepted by
// LoadComments.
std::string SerializeRawRecords(const CommentCollection& comments);

// Surfaces of the frequent-entity pool, in pool order.
std::vector<std::string> SynthFrequentSurfaces();

}  // namespace nemaudit

#endif  // NEMAUDIT_SYNTH_H_
