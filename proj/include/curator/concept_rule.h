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

#ifndef CURATOR_CONCEPT_RULE_H_
#define CURATOR_CONCEPT_RULE_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curator/concept.h"
#include "curator/corpus.h"
#include "curator/rank.h"

namespace curator {

// Boolean expression over concept names: AND binds tighter than OR; [ ] and
// ( ) group. Names are bare words (letters, digits, _ - .) or quoted.
struct ConceptExpr {
  enum class Kind { kAtom, kAnd, kOr };
  Kind kind = Kind::kAtom;
  std::string name;
  std::vector<ConceptExpr> children;
};

// Throws InvalidArgument with the offending offset.
ConceptExpr ParseConceptRule(std::string_view text);
std::string RenderConceptRule(const ConceptExpr& expr);

// Referenced names, first-appearance order, no duplicates.
std::vector<std::string> ConceptNames(const ConceptExpr& expr);

bool EvaluateConceptExpr(const ConceptExpr& expr,
                         const std::function<bool(const std::string&)>& contains);

// A document contains a concept when all normalized tokens of at least one
// member are among its tokens.
bool DocumentContains(const Concept& c, const DocView& doc, const Preprocessor& pre);

// First concept with this label over topic, category, person, organization,
// location, keyword.
const Concept* ResolveByName(const ConceptSource& source, std::string_view name);

using ConceptResolver = std::function<std::optional<Concept>(const std::string&)>;

// Filters documents by the expression, then ranks the passers over the union
// of referenced concepts. NotFound for unresolved names.
std::vector<RankedItem> EvalConceptRule(const ConceptExpr& expr, const Corpus& corpus,
                                        const ConceptResolver& resolve, size_t top_n,
                                        Preference* used = nullptr);

}  // namespace curator

#endif  // CURATOR_CONCEPT_RULE_H_
