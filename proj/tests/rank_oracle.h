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

#ifndef CURATOR_TESTS_RANK_ORACLE_H_
#define CURATOR_TESTS_RANK_ORACLE_H_

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "curator/corpus.h"
#include "curator/rank.h"

namespace curator::testing {

// Dense brute-force scoring: tf-idf document vectors rebuilt from the token
// lists, one weighted query vector per member combination, best query wins.
inline std::vector<double> BruteForceScores(const Preference& pref, const Corpus& corpus) {
  const size_t n = corpus.size();
  std::map<std::string, size_t> df;
  for (size_t i = 0; i < n; ++i) {
    const auto& toks = corpus.tokens(i).tokens;
    for (const auto& t : std::set<std::string>(toks.begin(), toks.end())) ++df[t];
  }
  std::vector<std::map<std::string, double>> docs(n);
  std::vector<double> norms(n);
  for (size_t i = 0; i < n; ++i) {
    for (const auto& t : corpus.tokens(i).tokens) docs[i][t] += 1.0;
    double s = 0;
    for (auto& [t, w] : docs[i]) {
      w *= std::log(static_cast<double>(n) / static_cast<double>(df[t]));
      s += w * w;
    }
    norms[i] = std::sqrt(s);
  }
  // Every member combination, recursively.
  std::vector<std::map<std::string, double>> queries;
  std::vector<size_t> pick(pref.concepts.size());
  const auto build = [&](auto&& self, size_t c) -> void {
    if (c == pref.concepts.size()) {
      std::map<std::string, double> q;
      for (size_t k = 0; k < c; ++k) {
        std::set<std::string> terms;
        const std::string norm = corpus.preprocessor().NormalizeTerm(pref.concepts[k].members[pick[k]]);
        size_t start = 0;
        while (start <= norm.size()) {
          const size_t sp = norm.find(' ', start);
          const std::string t = norm.substr(start, sp == std::string::npos ? std::string::npos : sp - start);
          if (!t.empty()) terms.insert(t);
          if (sp == std::string::npos) break;
          start = sp + 1;
        }
        for (const auto& t : terms) q[t] += pref.concepts[k].weight;
      }
      queries.push_back(q);
      return;
    }
    for (size_t m = 0; m < pref.concepts[c].members.size(); ++m) {
      pick[c] = m;
      self(self, c + 1);
    }
  };
  build(build, 0);
  std::vector<double> out(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    if (norms[i] == 0) continue;
    for (const auto& q : queries) {
      if (q.empty()) continue;
      double dot = 0;
      for (const auto& [t, w] : q) {
        auto it = docs[i].find(t);
        if (it != docs[i].end()) dot += w * it->second;
      }
      out[i] = std::max(out[i], dot / (norms[i] * std::sqrt(static_cast<double>(q.size()))));
    }
  }
  return out;
}

}  // namespace curator::testing

#endif  // CURATOR_TESTS_RANK_ORACLE_H_
