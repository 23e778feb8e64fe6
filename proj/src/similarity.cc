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

#include "curator/similarity.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "curator/error.h"
#include "curator/text.h"

namespace curator {

const char* MetricName(SimilarityMetric m) {
  switch (m) {
    case SimilarityMetric::kJaccard: return "jaccard";
    case SimilarityMetric::kLevenshteinNorm: return "levenshtein_norm";
    case SimilarityMetric::kJaro: return "jaro";
    case SimilarityMetric::kCosineTfidf: return "cosine_tfidf";
    case SimilarityMetric::kDice: return "dice";
  }
  return "?";
}

SimilarityMetric ParseMetric(std::string_view name) {
  const std::string n = ToLower(name);
  for (auto m : {SimilarityMetric::kJaccard, SimilarityMetric::kLevenshteinNorm,
                 SimilarityMetric::kJaro, SimilarityMetric::kCosineTfidf,
                 SimilarityMetric::kDice}) {
    if (n == MetricName(m)) return m;
  }
  throw InvalidArgument("unknown similarity metric: " + std::string(name));
}

namespace {

// Word lists that never come back empty for non-empty input, so word metrics
// stay defined on punctuation-only strings.
std::vector<std::string> Words(std::string_view s) {
  auto w = WordSequence(s);
  if (w.empty()) w.push_back(ToLower(Trim(s)));
  return w;
}

}  // namespace

double Jaccard(std::string_view a, std::string_view b) {
  const auto wa = Words(a), wb = Words(b);
  const std::set<std::string> sa(wa.begin(), wa.end()), sb(wb.begin(), wb.end());
  size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  const size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double LevenshteinNorm(std::string_view a_in, std::string_view b_in) {
  const std::string a = ToLower(a_in), b = ToLower(b_in);
  const size_t n = a.size(), m = b.size();
  if (n == 0 && m == 0) return 1.0;
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return 1.0 - static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

double JaroWinkler(std::string_view a_in, std::string_view b_in) {
  const std::string a = ToLower(a_in), b = ToLower(b_in);
  if (a == b) return 1.0;
  const int la = static_cast<int>(a.size()), lb = static_cast<int>(b.size());
  if (la == 0 || lb == 0) return 0.0;
  const int window = std::max(0, std::max(la, lb) / 2 - 1);
  std::vector<bool> ma(la, false), mb(lb, false);
  int matches = 0;
  for (int i = 0; i < la; ++i) {
    const int lo = std::max(0, i - window), hi = std::min(lb - 1, i + window);
    for (int j = lo; j <= hi; ++j) {
      if (mb[j] || a[i] != b[j]) continue;
      ma[i] = mb[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;
  int half_transpositions = 0;
  for (int i = 0, k = 0; i < la; ++i) {
    if (!ma[i]) continue;
    while (!mb[k]) ++k;
    if (a[i] != b[k]) ++half_transpositions;
    ++k;
  }
  const double m = matches;
  const int transpositions = half_transpositions / 2;
  const double jaro = (m / la + m / lb + (m - transpositions) / m) / 3.0;
  int prefix = 0;
  while (prefix < 4 && prefix < std::min(la, lb) && a[prefix] == b[prefix]) ++prefix;
  return std::min(1.0, jaro + 0.1 * prefix * (1.0 - jaro));
}

double CosineTfidf(std::string_view a, std::string_view b, const IdfTable* idf) {
  std::map<std::string, double> va, vb;
  const auto weight = [&](const std::string& w) {
    if (!idf) return 1.0;
    auto it = idf->find(w);
    return it == idf->end() ? 1.0 : it->second;
  };
  for (const auto& w : Words(a)) va[w] += 1.0;
  for (const auto& w : Words(b)) vb[w] += 1.0;
  double dot = 0, na = 0, nb = 0;
  for (auto& [w, c] : va) {
    c *= weight(w);
    na += c * c;
  }
  for (auto& [w, c] : vb) {
    c *= weight(w);
    nb += c * c;
    if (auto it = va.find(w); it != va.end()) dot += it->second * c;
  }
  if (na == 0 || nb == 0) return ToLower(a) == ToLower(b) ? 1.0 : 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double Dice(std::string_view a_in, std::string_view b_in) {
  const std::string a = ToLower(a_in), b = ToLower(b_in);
  if (a == b) return 1.0;
  if (a.size() < 2 || b.size() < 2) return 0.0;
  std::map<std::string, int> ba;
  for (size_t i = 0; i + 1 < a.size(); ++i) ++ba[a.substr(i, 2)];
  int shared = 0;
  for (size_t i = 0; i + 1 < b.size(); ++i) {
    auto it = ba.find(b.substr(i, 2));
    if (it != ba.end() && it->second > 0) {
      --it->second;
      ++shared;
    }
  }
  return 2.0 * shared / static_cast<double>((a.size() - 1) + (b.size() - 1));
}

double StringSimilarity(std::string_view a, std::string_view b, SimilarityMetric metric,
                        const IdfTable* idf) {
  if (Trim(a).empty() || Trim(b).empty()) {
    throw InvalidArgument("similarity requires non-empty strings");
  }
  switch (metric) {
    case SimilarityMetric::kJaccard: return Jaccard(a, b);
    case SimilarityMetric::kLevenshteinNorm: return LevenshteinNorm(a, b);
    case SimilarityMetric::kJaro: return JaroWinkler(a, b);
    case SimilarityMetric::kCosineTfidf: return CosineTfidf(a, b, idf);
    case SimilarityMetric::kDice: return Dice(a, b);
  }
  return 0.0;
}

}  // namespace curator
