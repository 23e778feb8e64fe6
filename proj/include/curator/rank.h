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

#ifndef CURATOR_RANK_H_
#define CURATOR_RANK_H_

#include <string>
#include <vector>

#include "curator/concept.h"
#include "curator/corpus.h"
#include "json.hpp"

namespace curator {

// Ordered concepts with their weights W_C (Concept::weight).
struct Preference {
  std::vector<Concept> concepts;
  void Validate() const;  // >= 1 concept, non-empty members, weights > 0
};

// One attribute per concept, in preference order.
using ConceptQuery = std::vector<std::string>;

// Cartesian product of member lists; the last concept varies fastest.
std::vector<ConceptQuery> ConceptQueries(const Preference& pref);

// A query reduced to index terms: distinct normalized tokens, each with the
// summed weight of the concepts it came from.
struct CompiledQuery {
  std::vector<std::string> terms;
  std::vector<double> weights;
  // per term: (concept index, W_C) of each concept it came from
  std::vector<std::vector<std::pair<size_t, double>>> concepts;
};

std::vector<CompiledQuery> CompileQueries(const Preference& pref,
                                          const std::vector<ConceptQuery>& queries,
                                          const Preprocessor& pre);

struct RankedItem {
  std::string doc_id;
  size_t doc = 0;
  double score = 0.0;
  std::vector<double> contributions;  // per concept; sums to score
  size_t query = 0;                    // index of the best query
};

// S(d, q) = sum_t tfidf(t, d) * W_t / (|d| * |q|) with |q| = sqrt(#terms);
// document score is the max over queries (first best query wins ties).
RankedItem ScoreDocument(const Corpus& corpus, size_t doc, const std::vector<CompiledQuery>& queries,
                         size_t concept_count);

// Descending by score, ties by doc id; zero scores dropped; at most top_n.
// OpenMP-parallel over documents; RankSerial is the reference.
std::vector<RankedItem> Rank(const Preference& pref, const Corpus& corpus, size_t top_n);
std::vector<RankedItem> RankSerial(const Preference& pref, const Corpus& corpus, size_t top_n);

// Restricts ranking to `docs` (corpus indices).
std::vector<RankedItem> RankSubset(const Preference& pref, const Corpus& corpus,
                                   const std::vector<size_t>& docs, size_t top_n);

// Reads {"concepts": [{"label", "kind"?, "members"?, "weight"?}]}. Concepts
// without members are resolved through `source`.
Preference PreferenceFromJson(const nlohmann::json& j, const ConceptSource* source);
nlohmann::json RankedToJson(const std::vector<RankedItem>& items, const Preference& pref);

}  // namespace curator

#endif  // CURATOR_RANK_H_
