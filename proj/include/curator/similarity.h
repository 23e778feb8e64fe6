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

#ifndef CURATOR_SIMILARITY_H_
#define CURATOR_SIMILARITY_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace curator {

enum class SimilarityMetric { kJaccard, kLevenshteinNorm, kJaro, kCosineTfidf, kDice };

const char* MetricName(SimilarityMetric m);
// Throws InvalidArgument for unknown names.
SimilarityMetric ParseMetric(std::string_view name);

// Inverse document frequencies for cosine_tfidf; absent words weigh 1.
using IdfTable = std::unordered_map<std::string, double>;

// Scores in [0, 1]; identical inputs (after casefolding) score exactly 1.
//   jaccard          word-set overlap
//   levenshtein_norm 1 - edit_distance / max(length)
//   jaro             Jaro-Winkler (prefix scale 0.1, prefix <= 4)
//   cosine_tfidf     cosine of idf-weighted word-count vectors
//   dice             Sorensen-Dice over character bigrams
double StringSimilarity(std::string_view a, std::string_view b, SimilarityMetric metric,
                        const IdfTable* idf = nullptr);

double Jaccard(std::string_view a, std::string_view b);
double LevenshteinNorm(std::string_view a, std::string_view b);
double JaroWinkler(std::string_view a, std::string_view b);
double CosineTfidf(std::string_view a, std::string_view b, const IdfTable* idf);
double Dice(std::string_view a, std::string_view b);

}  // namespace curator

#endif  // CURATOR_SIMILARITY_H_
