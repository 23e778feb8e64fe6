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

#include "curator/rank.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "curator/error.h"
#include "curator/text.h"

namespace curator {

using nlohmann::json;

void Preference::Validate() const {
  if (concepts.empty()) throw InvalidArgument("preference needs at least one concept");
  for (const auto& c : concepts) {
    if (c.members.empty()) throw InvalidArgument("concept has no members: " + c.label);
    if (!(c.weight > 0.0)) throw InvalidArgument("concept weight must be > 0: " + c.label);
  }
}

std::vector<ConceptQuery> ConceptQueries(const Preference& pref) {
  pref.Validate();
  std::vector<ConceptQuery> out;
  std::vector<size_t> idx(pref.concepts.size(), 0);
  while (true) {
    ConceptQuery q;
    for (size_t i = 0; i < idx.size(); ++i) q.push_back(pref.concepts[i].members[idx[i]]);
    out.push_back(std::move(q));
    size_t k = idx.size();
    while (true) {
      if (k == 0) return out;
      --k;
      if (++idx[k] < pref.concepts[k].members.size()) break;
      idx[k] = 0;
    }
  }
}

std::vector<CompiledQuery> CompileQueries(const Preference& pref,
                                          const std::vector<ConceptQuery>& queries,
                                          const Preprocessor& pre) {
  std::vector<CompiledQuery> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    std::map<std::string, std::vector<std::pair<size_t, double>>> terms;
    for (size_t c = 0; c < q.size(); ++c) {
      std::vector<std::string> tokens;
      for (auto& t : SplitOn(pre.NormalizeTerm(q[c]), ' ')) {
        if (!t.empty()) tokens.push_back(std::move(t));
      }
      std::sort(tokens.begin(), tokens.end());
      tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
      for (const auto& t : tokens) terms[t].push_back({c, pref.concepts[c].weight});
    }
    CompiledQuery cq;
    for (auto& [t, cs] : terms) {
      double w = 0.0;
      for (const auto& [c, wc] : cs) w += wc;
      cq.terms.push_back(t);
      cq.weights.push_back(w);
      cq.concepts.push_back(std::move(cs));
    }
    out.push_back(std::move(cq));
  }
  return out;
}

RankedItem ScoreDocument(const Corpus& corpus, size_t doc, const std::vector<CompiledQuery>& queries,
                         size_t concept_count) {
  if (doc >= corpus.size()) throw NotFound("unknown document index " + std::to_string(doc));
  RankedItem best;
  best.doc = doc;
  best.doc_id = corpus.doc(doc).doc_id;
  best.contributions.assign(concept_count, 0.0);
  const double norm = corpus.DocNorm(doc);
  if (norm <= 0.0) return best;
  std::vector<double> contrib(concept_count);
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    const auto& q = queries[qi];
    if (q.terms.empty()) continue;
    const double denom = norm * std::sqrt(static_cast<double>(q.terms.size()));
    std::fill(contrib.begin(), contrib.end(), 0.0);
    double score = 0.0;
    for (size_t t = 0; t < q.terms.size(); ++t) {
      const double x = corpus.TfIdf(q.terms[t], doc);
      if (x == 0.0) continue;
      for (const auto& [c, wc] : q.concepts[t]) {
        const double part = x * wc / denom;
        contrib[c] += part;
        score += part;
      }
    }
    if (score > best.score) {
      best.score = score;
      best.query = qi;
      best.contributions = contrib;
    }
  }
  return best;
}

namespace {

void Order(std::vector<RankedItem>* items, size_t top_n) {
  std::erase_if(*items, [](const RankedItem& r) { return !(r.score > 0.0); });
  std::sort(items->begin(), items->end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (items->size() > top_n) items->resize(top_n);
}

std::vector<CompiledQuery> Prepare(const Preference& pref, const Corpus& corpus, size_t top_n) {
  if (top_n == 0) throw InvalidArgument("top_n must be >= 1");
  return CompileQueries(pref, ConceptQueries(pref), corpus.preprocessor());
}

}  // namespace

std::vector<RankedItem> Rank(const Preference& pref, const Corpus& corpus, size_t top_n) {
  const auto queries = Prepare(pref, corpus, top_n);
  // Only documents holding some query term can score above zero.
  std::vector<uint8_t> hit(corpus.size(), 0);
  for (const auto& q : queries) {
    for (const auto& t : q.terms) {
      for (const Posting& p : corpus.Postings(t)) hit[p.doc] = 1;
    }
  }
  std::vector<size_t> docs;
  for (size_t i = 0; i < hit.size(); ++i) {
    if (hit[i]) docs.push_back(i);
  }
  const size_t k = pref.concepts.size();
  std::vector<RankedItem> items(docs.size());
  const long n = static_cast<long>(docs.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (long i = 0; i < n; ++i) {
    items[i] = ScoreDocument(corpus, docs[i], queries, k);
  }
  Order(&items, top_n);
  return items;
}

std::vector<RankedItem> RankSerial(const Preference& pref, const Corpus& corpus, size_t top_n) {
  const auto queries = Prepare(pref, corpus, top_n);
  std::vector<RankedItem> items;
  items.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    items.push_back(ScoreDocument(corpus, i, queries, pref.concepts.size()));
  }
  Order(&items, top_n);
  return items;
}

std::vector<RankedItem> RankSubset(const Preference& pref, const Corpus& corpus,
                                   const std::vector<size_t>& docs, size_t top_n) {
  const auto queries = Prepare(pref, corpus, top_n);
  std::vector<RankedItem> items(docs.size());
  const long n = static_cast<long>(docs.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (long i = 0; i < n; ++i) {
    items[i] = ScoreDocument(corpus, docs[i], queries, pref.concepts.size());
  }
  Order(&items, top_n);
  return items;
}

Preference PreferenceFromJson(const json& j, const ConceptSource* source) {
  if (!j.is_object() || !j.contains("concepts") || !j.at("concepts").is_array()) {
    throw InvalidArgument("preference: expected {\"concepts\": [...]}");
  }
  Preference pref;
  for (const auto& c : j.at("concepts")) {
    if (!c.is_object() || !c.contains("label")) throw InvalidArgument("preference concept needs a label");
    Concept con;
    con.label = c.at("label").get<std::string>();
    const std::string kind_name = c.value("kind", "topic");
    const auto kind = ParseSummaryKind(kind_name);
    if (!kind) throw InvalidArgument("unknown concept kind: " + kind_name);
    con.kind = *kind;
    con.weight = c.value("weight", 1.0);
    if (c.contains("members")) {
      con.members = c.at("members").get<std::vector<std::string>>();
    } else {
      const Concept* found = source ? source->Resolve(con.kind, con.label) : nullptr;
      if (!found) throw NotFound("unresolved concept: " + con.label);
      con.members = found->members;
    }
    pref.concepts.push_back(std::move(con));
  }
  pref.Validate();
  return pref;
}

json RankedToJson(const std::vector<RankedItem>& items, const Preference& pref) {
  json out = json::array();
  for (const auto& r : items) {
    json contrib = json::array();
    for (size_t c = 0; c < pref.concepts.size() && c < r.contributions.size(); ++c) {
      contrib.push_back({{"concept", pref.concepts[c].label}, {"value", r.contributions[c]}});
    }
    out.push_back({{"doc_id", r.doc_id}, {"score", r.score}, {"contributions", contrib}});
  }
  return out;
}

}  // namespace curator
