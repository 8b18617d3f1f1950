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

#include "nemaudit/synth.h"

#include <cstdio>
#include <span>
#include <string_view>
#include <utility>

#include "json.hpp"
#include "nemaudit/error.h"
#include "nemaudit/random.h"

namespace nemaudit {
namespace {

struct PoolEntity {
  std::string_view surface;
  std::string_view label;
  double weight;
};

// Frequent entities of the positive class, weighted roughly like a
// long-tailed topic distribution.
constexpr PoolEntity kFrequent[] = {
    {"US", "GPE", 79},     {"TIE", "ORG", 79},     {"Trump", "ORG", 67},
    {"Bitcoin", "ORG", 52}, {"Hillary", "PERSON", 39}, {"America", "GPE", 38},
    {"Russia", "GPE", 37}, {"Russian", "NORP", 31}, {"ISIS", "ORG", 29},
    {"BTC", "ORG", 28},
};

// Entities every class mentions. The label mix roughly follows the
// frequent pool so that mask tokens alone carry little class signal.
constexpr PoolEntity kOther[] = {
    {"London", "GPE", 6},   {"Germany", "GPE", 6},   {"France", "GPE", 5},
    {"China", "GPE", 5},    {"Canada", "GPE", 5},    {"Texas", "GPE", 5},
    {"Google", "ORG", 11},  {"Microsoft", "ORG", 11}, {"NASA", "ORG", 11},
    {"Tesla", "ORG", 10},   {"Reuters", "ORG", 10},  {"Obama", "PERSON", 3},
    {"Merkel", "PERSON", 3}, {"Elon", "PERSON", 2},  {"German", "NORP", 2},
    {"French", "NORP", 2},  {"Canadian", "NORP", 2}, {"Europe", "LOC", 1},
    {"Olympics", "EVENT", 1},
};

// Excluded-type mentions, frequent in the positive class so that the
// exclusion rules have something to remove.
constexpr PoolEntity kTemporal[] = {
    {"Monday", "DATE", 1}, {"2016", "DATE", 1},   {"last year", "DATE", 1},
    {"seven", "CARDINAL", 1}, {"dozens", "CARDINAL", 1}, {"50%", "PERCENT", 1},
};

const std::vector<std::string_view> kCommon = {
    "the",    "of",     "and",    "to",     "in",    "is",
    "it",     "that",   "for",    "on",     "with",   "as",    "was",
    "they",   "be",     "at",     "have",   "from",   "this",  "but",
    "not",    "what",   "all",    "were",   "when",   "we",    "there",
    "can",    "an",     "your",   "which",  "their",  "said",  "if",
    "do",     "will",   "each",   "about",  "how",    "up",    "out",
    "them",   "then",   "she",    "many",   "some",   "so",    "these",
    "would",  "other",  "into",   "has",    "more",   "her",   "two",
    "like",   "him",    "see",    "time",   "could",  "no",    "make",
    "than",   "first",  "been",   "its",    "who",    "now",   "people",
    "my",     "made",   "over",   "did",    "down",   "only",  "way",
    "find",   "use",    "may",    "water",  "long",   "little", "very",
    "after",  "words",  "called", "just",   "where",  "most",  "know",
};

// Stand-in for transferred L1 habits shared by the positive class.
const std::vector<std::string_view> kTransferStyle = {
    "indeed",   "whole",    "thus",     "such",    "already",  "anyway",
    "propaganda", "western", "regime",  "truly",   "obviously", "simply",
    "exactly",  "nobody",   "everyone", "stupid",  "sheep",    "lies",
    "mainstream", "elites", "globalist", "puppet", "agenda",   "lol",
    "comrade",  "brother",  "surely",   "totally", "ridiculous", "clown",
};

const std::vector<std::string_view> kNativeStyle = {
    "honestly", "literally", "basically", "gonna",   "kinda",   "dude",
    "awesome",  "pretty",    "super",     "yeah",    "cool",    "tbh",
    "guess",    "maybe",     "probably",  "actually", "stuff",  "thing",
    "folks",    "neat",      "weird",     "fun",     "yep",     "nice",
    "reckon",   "mate",      "cheers",    "lovely",  "bloody",  "wanna",
};

const std::vector<std::string_view> kRussianFlairs = {
    "Moscow", "Saint Petersburg", "Russia", "Tatarstan", "Novosibirsk Oblast",
    "Kazan, Russia"};
const std::vector<std::string_view> kEnglishFlairs = {
    "United Kingdom", "USA", "Canada", "Ireland", "Australia", "England"};
const std::vector<std::string_view> kOtherFlairs = {"Germany", "Finland",
                                                     "Poland"};

const std::vector<std::string_view> kShortFragments = {"Yes.", "Agreed.", "Lol.",
                                                        "Nope.", "Why?"};

enum class Style { kTransfer, kNative, kMixed };

class Generator {
 public:
  Generator(const SynthConfig& config) : config_(config), rng_(config.seed) {}

  const PoolEntity& Weighted(std::span<const PoolEntity> pool) {
    double total = 0.0;
    for (const auto& e : pool) total += e.weight;
    double u = rng_.Uniform01() * total;
    for (const auto& e : pool) {
      if (u < e.weight) return e;
      u -= e.weight;
    }
    return pool.back();
  }

  std::string_view StyleWord(Style style) {
    switch (style) {
      case Style::kTransfer:
        return rng_.Pick(kTransferStyle);
      case Style::kNative:
        return rng_.Pick(kNativeStyle);
      case Style::kMixed:
        return rng_.Bernoulli(config_.style_overlap) ? rng_.Pick(kTransferStyle)
                                                     : rng_.Pick(kNativeStyle);
    }
    return "";
  }

  std::string Sentence(Style style, double fne_rate, bool positive) {
    std::vector<std::string> words;
    const std::size_t n = 6 + rng_.UniformIndex(5);
    for (std::size_t i = 0; i < n; ++i) {
      words.emplace_back(rng_.Bernoulli(kStyleDensity) ? StyleWord(style)
                                                       : rng_.Pick(kCommon));
    }
    auto insert = [&](std::string_view surface) {
      words.insert(words.begin() + rng_.UniformIndex(words.size() + 1),
                   std::string(surface));
    };
    // Every class mentions an entity at the same overall rate; the classes
    // differ in how often that entity comes from the frequent pool.
    if (rng_.Bernoulli(fne_rate)) {
      insert(Weighted(kFrequent).surface);
    } else if (fne_rate < kEntityRate &&
               rng_.Bernoulli((kEntityRate - fne_rate) / (1.0 - fne_rate))) {
      insert(Weighted(kOther).surface);
    }
    if (rng_.Bernoulli(positive ? 0.3 : 0.1)) insert(Weighted(kTemporal).surface);

    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) out += ' ';
      out += words[i];
    }
    if (out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
    if (positive && rng_.Bernoulli(0.05)) out += " :D";
    const double u = rng_.Uniform01();
    out += u < 0.8 ? "." : (u < 0.9 ? "!" : "?");
    return out;
  }

  std::string Body(Style style, double fne_rate, bool positive) {
    std::string body;
    auto append = [&](const std::string& s, std::string_view sep = " ") {
      if (!body.empty()) body += sep;
      body += s;
    };
    if (rng_.Bernoulli(0.05)) {
      append("&gt; " + Sentence(style, fne_rate, positive) + "\n");
    }
    const std::size_t n = 1 + rng_.UniformIndex(3);
    for (std::size_t i = 0; i < n; ++i) {
      append(Sentence(style, fne_rate, positive), rng_.Bernoulli(0.1) ? "\\n" : " ");
    }
    if (rng_.Bernoulli(0.1)) append(std::string(rng_.Pick(kShortFragments)));
    if (rng_.Bernoulli(0.05)) {
      append("Source here https://example.org/item" + std::to_string(rng_.UniformIndex(1000)));
    }
    return body;
  }

  void Emit(CommentCollection* out, std::string_view prefix, const std::string& author,
            std::string_view subreddit, std::optional<std::string> flair, Style style,
            double fne_rate, bool positive, SourceLabel label) {
    Comment c;
    char id[32];
    std::snprintf(id, sizeof(id), "%.*s%06d", static_cast<int>(prefix.size()),
                  prefix.data(), next_id_++);
    c.id = id;
    c.author = author;
    c.body = Body(style, fne_rate, positive);
    c.subreddit = std::string(subreddit);
    c.created_utc = 1500000000 + 97LL * next_id_;
    c.flair = std::move(flair);
    c.source_label = label;
    out->push_back(std::move(c));
    if (rng_.Bernoulli(0.03)) {
      Comment dup = out->back();
      std::snprintf(id, sizeof(id), "%.*s%06d", static_cast<int>(prefix.size()),
                    prefix.data(), next_id_++);
      dup.id = id;
      dup.created_utc += 3600;
      out->push_back(std::move(dup));
    }
  }

  Rng& rng() { return rng_; }

 private:
  static constexpr double kStyleDensity = 0.3;
  static constexpr double kEntityRate = 0.7;

  const SynthConfig& config_;
  Rng rng_;
  int next_id_ = 0;
};

std::string Name(std::string_view prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*s%03d", static_cast<int>(prefix.size()),
                prefix.data(), i);
  return buf;
}

}  // namespace

void SynthConfig::Validate() const {
  for (double rate : {entity_rate_pos, entity_rate_group_b, entity_rate_group_a,
                      style_overlap}) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw ValidationError("synthetic rates must lie in [0, 1]");
    }
  }
  if (suspect_comments < 1 || random_comments < 1 || group_a_comments < 1 ||
      group_b_comments < 1) {
    throw ValidationError("synthetic corpus sizes must be >= 1");
  }
}

SynthCorpora GenerateSynthetic(const SynthConfig& config) {
  config.Validate();
  Generator gen(config);
  Rng& rng = gen.rng();
  SynthCorpora out;

  const int suspect_accounts = std::max(1, config.suspect_comments / 8);
  for (int i = 0; i < config.suspect_comments; ++i) {
    gen.Emit(&out.suspect, "s", Name("acct_", static_cast<int>(rng.UniformIndex(suspect_accounts))),
             rng.Bernoulli(0.5) ? "politics" : "worldnews", std::nullopt,
             Style::kTransfer, config.entity_rate_pos, true, SourceLabel::kSuspect);
  }

  const int random_users = std::max(1, config.random_comments / 3);
  for (int i = 0; i < config.random_comments; ++i) {
    gen.Emit(&out.random_negative, "r",
             Name("user_", static_cast<int>(rng.UniformIndex(random_users))),
             rng.Bernoulli(0.5) ? "AskReddit" : "pics", std::nullopt, Style::kNative,
             config.entity_rate_group_a, false, SourceLabel::kRandomNegative);
  }
  for (int i = 0; i < 4; ++i) {
    gen.Emit(&out.random_negative, "r", "tldr_bot", "AskReddit", std::nullopt,
             Style::kNative, config.entity_rate_group_a, false,
             SourceLabel::kRandomNegative);
  }

  // Evaluation users carry flairs; a few carry flairs no rule maps.
  const int a_users = std::max(1, config.group_a_comments / 4);
  const int b_users = std::max(1, config.group_b_comments / 4);
  std::vector<std::string> a_flair(a_users);
  std::vector<std::string> b_flair(b_users);
  for (auto& f : a_flair) f = std::string(rng.Pick(kEnglishFlairs));
  for (auto& f : b_flair) f = std::string(rng.Pick(kRussianFlairs));
  for (int i = 0; i < config.group_b_comments; ++i) {
    const int u = static_cast<int>(rng.UniformIndex(b_users));
    gen.Emit(&out.evaluation, "e", Name("vetka_", u), "AskARussian", b_flair[u],
             Style::kMixed, config.entity_rate_group_b, false, SourceLabel::kEvaluation);
  }
  for (int i = 0; i < config.group_a_comments; ++i) {
    const int u = static_cast<int>(rng.UniformIndex(a_users));
    gen.Emit(&out.evaluation, "e", Name("maple_", u), "europe", a_flair[u],
             Style::kNative, config.entity_rate_group_a, false, SourceLabel::kEvaluation);
  }
  for (int i = 0; i < 10; ++i) {
    gen.Emit(&out.evaluation, "e", Name("nord_", i % 3), "europe",
             std::string(kOtherFlairs[i % 3]), Style::kNative,
             config.entity_rate_group_a, false, SourceLabel::kEvaluation);
  }
  for (int i = 0; i < 3; ++i) {
    gen.Emit(&out.evaluation, "e", "welcome-bot", "AskARussian", std::string("Moscow"),
             Style::kMixed, config.entity_rate_group_b, false, SourceLabel::kEvaluation);
  }
  out.existing_users = {Name("vetka_", 0), Name("maple_", 0)};

  auto add_lines = [&](std::span<const PoolEntity> pool) {
    for (const auto& e : pool) {
      out.gazetteer_tsv += std::string(e.surface) + "\t" + std::string(e.label) + "\n";
    }
  };
  add_lines(kFrequent);
  add_lines(kOther);
  add_lines(kTemporal);
  out.gazetteer_tsv += ":D\tPERSON\n";
  return out;
}

std::string SerializeRawRecords(const CommentCollection& comments) {
  std::string out;
  for (const Comment& c : comments) {
    nlohmann::json obj = {{"id", c.id},
                          {"author", c.author},
                          {"body", c.body},
                          {"subreddit", c.subreddit},
                          {"created_utc", c.created_utc}};
    if (c.flair) obj["flair"] = *c.flair;
    out += obj.dump() + "\n";
  }
  return out;
}

std::vector<std::string> SynthFrequentSurfaces() {
  std::vector<std::string> out;
  for (const auto& e : kFrequent) out.emplace_back(e.surface);
  return out;
}

}  // namespace nemaudit
