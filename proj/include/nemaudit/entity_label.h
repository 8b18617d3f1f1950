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

#ifndef NEMAUDIT_ENTITY_LABEL_H_
#define NEMAUDIT_ENTITY_LABEL_H_

#include <array>
#include <string>
#include <string_view>

namespace nemaudit {

enum class EntityLabel {
  kPerson,
  kOrg,
  kGpe,
  kNorp,
  kDate,
  kCardinal,
  kPercent,
  kLoc,
  kEvent,
  kOther,
};

inline constexpr std::array<EntityLabel, 10> kAllEntityLabels = {
    EntityLabel::kPerson,  EntityLabel::kOrg,      EntityLabel::kGpe,
    EntityLabel::kNorp,    EntityLabel::kDate,     EntityLabel::kCardinal,
    EntityLabel::kPercent, EntityLabel::kLoc,      EntityLabel::kEvent,
    EntityLabel::kOther};

std::string_view ToString(EntityLabel label);
// Exact uppercase names ("PERSON", "GPE", ...). Throws Error(kValidation).
EntityLabel ParseEntityLabel(std::string_view text);

// "[GPE]" and so on; the tokenizer keeps these as single tokens.
std::string MaskToken(EntityLabel label);

}  // namespace nemaudit

#endif  // NEMAUDIT_ENTITY_LABEL_H_
