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

#include "nemaudit/entity_label.h"

#include "nemaudit/error.h"

namespace nemaudit {

std::string_view ToString(EntityLabel label) {
  switch (label) {
    case EntityLabel::kPerson:
      return "PERSON";
    case EntityLabel::kOrg:
      return "ORG";
    case EntityLabel::kGpe:
      return "GPE";
    case EntityLabel::kNorp:
      return "NORP";
    case EntityLabel::kDate:
      return "DATE";
    case EntityLabel::kCardinal:
      return "CARDINAL";
    case EntityLabel::kPercent:
      return "PERCENT";
    case EntityLabel::kLoc:
      return "LOC";
    case EntityLabel::kEvent:
      return "EVENT";
    case EntityLabel::kOther:
      return "OTHER";
  }
  return "OTHER";
}

EntityLabel ParseEntityLabel(std::string_view text) {
  for (EntityLabel label : kAllEntityLabels) {
    if (ToString(label) == text) return label;
  }
  throw ValidationError("unknown entity label '" + std::string(text) + "'");
}

std::string MaskToken(EntityLabel label) {
  return "[" + std::string(ToString(label)) + "]";
}

}  // namespace nemaudit
