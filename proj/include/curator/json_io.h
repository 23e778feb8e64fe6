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

#ifndef CURATOR_JSON_IO_H_
#define CURATOR_JSON_IO_H_

#include <string>

#include "curator/concept.h"
#include "curator/rule.h"
#include "curator/summarize.h"
#include "json.hpp"

namespace curator {

nlohmann::json FeatureToJson(const Feature& f);
nlohmann::json ConceptToJson(const Concept& c);

// {rule_id, tag, children_cap, dsl, nodes: [...], paths: [...]}
nlohmann::json RuleToJson(const RuleTree& rule);

// {wedge_count, kinds: {kind: [{label, members, frequency, relevancy, weight}]},
//  errors: {kind: message}}
nlohmann::json SummariesToJson(const SummarySet& set);

// Writes `j` (2-space indent, trailing newline) via a temporary file.
void WriteJsonFile(const std::string& path, const nlohmann::json& j);
nlohmann::json ReadJsonFile(const std::string& path);

}  // namespace curator

#endif  // CURATOR_JSON_IO_H_
