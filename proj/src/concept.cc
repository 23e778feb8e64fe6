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

#include "curator/concept.h"

#include "curator/text.h"

namespace curator {

const char* SummaryKindName(SummaryKind kind) {
  switch (kind) {
    case SummaryKind::kTopic: return "topic";
    case SummaryKind::kCategory: return "category";
    case SummaryKind::kPerson: return "person";
    case SummaryKind::kOrganization: return "organization";
    case SummaryKind::kLocation: return "location";
    case SummaryKind::kKeyword: return "keyword";
  }
  return "?";
}

std::optional<SummaryKind> ParseSummaryKind(std::string_view name) {
  const std::string n = ToLower(name);
  for (SummaryKind k : kAllSummaryKinds) {
    if (n == SummaryKindName(k)) return k;
  }
  if (n == "org") return SummaryKind::kOrganization;
  return std::nullopt;
}

void ConceptRegistry::Put(Concept c) {
  auto key = std::make_pair(c.kind, ToLower(c.label));
  concepts_[std::move(key)] = std::move(c);
}

const Concept* ConceptRegistry::Find(SummaryKind kind, std::string_view label) const {
  auto it = concepts_.find({kind, ToLower(label)});
  return it == concepts_.end() ? nullptr : &it->second;
}

const Concept* ConceptRegistry::Resolve(SummaryKind kind, std::string_view label) const {
  if (const Concept* c = Find(kind, label)) return c;
  return fallback_ ? fallback_->Resolve(kind, label) : nullptr;
}

}  // namespace curator
