// Copyright 2026 The Curator Authors.
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

#ifndef CURATOR_CONCEPT_H_
#define CURATOR_CONCEPT_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curator {

enum class SummaryKind { kTopic, kCategory, kPerson, kOrganization, kLocation, kKeyword };

inline constexpr SummaryKind kAllSummaryKinds[] = {
    SummaryKind::kTopic,        SummaryKind::kCategory, SummaryKind::kPerson,
    SummaryKind::kOrganization, SummaryKind::kLocation, SummaryKind::kKeyword};

const char* SummaryKindName(SummaryKind kind);
std::optional<SummaryKind> ParseSummaryKind(std::string_view name);

// A group of related attributes treated as one unit. Members are surface
// attributes (keywords or entity names); weight is W_C.
struct Concept {
  std::string label;
  SummaryKind kind = SummaryKind::kKeyword;
  std::vector<std::string> members;
  double weight = 0.0;
};

// Resolves concept references used by in_group features.
class ConceptSource {
 public:
  virtual ~ConceptSource() = default;
  virtual const Concept* Resolve(SummaryKind kind, std::string_view label) const = 0;
};

// Explicitly registered concepts, looked up case-insensitively by
// (kind, label), with an optional fallback source.
class ConceptRegistry : public ConceptSource {
 public:
  ConceptRegistry() = default;
  explicit ConceptRegistry(const ConceptSource* fallback) : fallback_(fallback) {}

  void set_fallback(const ConceptSource* fallback) { fallback_ = fallback; }

  // Replaces any existing concept with the same key.
  void Put(Concept c);
  const Concept* Resolve(SummaryKind kind, std::string_view label) const override;
  const Concept* Find(SummaryKind kind, std::string_view label) const;

  const std::map<std::pair<SummaryKind, std::string>, Concept>& all() const {
    return concepts_;
  }

 private:
  std::map<std::pair<SummaryKind, std::string>, Concept> concepts_;
  const ConceptSource* fallback_ = nullptr;
};

}  // namespace curator

#endif  // CURATOR_CONCEPT_H_
