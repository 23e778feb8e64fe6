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

#include <gtest/gtest.h>

#include <random>

#include "curator/concept_rule.h"
#include "curator/error.h"
#include "curator/rank.h"
#include "rank_oracle.h"
#include "test_util.h"

namespace curator {
namespace {

Concept C(std::string label, std::vector<std::string> members, double w = 1.0) {
  return Concept{std::move(label), SummaryKind::kKeyword, std::move(members), w};
}

TEST(Queries, CartesianProduct) {
  Preference p{{C("HealthMinisters", {"Greg Hunt", "Brad Hazzard"}), C("Budget", {"fund", "money", "budget"})}};
  const auto q = ConceptQueries(p);
  ASSERT_EQ(q.size(), 6u);
  EXPECT_EQ(q[0], (ConceptQuery{"Greg Hunt", "fund"}));
  EXPECT_EQ(q[1], (ConceptQuery{"Greg Hunt", "money"}));
  EXPECT_EQ(q[5], (ConceptQuery{"Brad Hazzard", "budget"}));
  EXPECT_EQ(ConceptQueries({{C("a", {"x", "y", "z"})}}).size(), 3u);
  EXPECT_EQ(ConceptQueries({{C("a", {"x"}), C("b", {"y"})}}).size(), 1u);
  EXPECT_THROW(ConceptQueries({{C("a", {})}}), Error);
  EXPECT_THROW(ConceptQueries({{C("a", {"x"}, 0.0)}}), Error);
}

const Corpus& Toy() {
  static const Corpus c = testing::MakeCorpus({{"1", "hospital health funding cuts"},
                                               {"2", "hospital waiting lists"},
                                               {"3", "football results"}});
  return c;
}

TEST(Score, ToyCorpusMatchesOracle) {
  const Preference p{{C("Care", {"hospital", "clinic"}), C("Money", {"funding"}, 2.0)}};
  const auto oracle = testing::BruteForceScores(p, Toy());
  const auto queries = CompileQueries(p, ConceptQueries(p), Toy().preprocessor());
  for (size_t i = 0; i < Toy().size(); ++i) {
    const RankedItem r = ScoreDocument(Toy(), i, queries, 2);
    EXPECT_NEAR(r.score, oracle[i], 1e-9);
    double sum = 0;
    for (double x : r.contributions) sum += x;
    EXPECT_NEAR(sum, r.score, 1e-12);
  }
  EXPECT_EQ(ScoreDocument(Toy(), 2, queries, 2).score, 0.0);
}

TEST(Rank, Examples) {
  const Preference all{{C("a", {"hospital"}), C("b", {"health"})}};
  const auto r = Rank(all, Toy(), 10);
  ASSERT_FALSE(r.empty());
  EXPECT_EQ(r[0].doc_id, "1");
  EXPECT_EQ(Rank(all, Toy(), 1).size(), 1u);
  EXPECT_TRUE(Rank({{C("z", {"cricket"})}}, Toy(), 10).empty());
  EXPECT_THROW(Rank(all, Toy(), 0), Error);
}

Corpus RandomCorpus(std::mt19937_64& rng, size_t docs) {
  static const std::vector<std::string> words = {"alpha", "bravo",  "charlie", "delta",
                                                 "echo",  "golf",   "hotel",   "india",
                                                 "juliet", "kilo"};
  std::vector<std::pair<std::string, std::string>> d;
  for (size_t i = 0; i < docs; ++i) {
    std::string text;
    const size_t len = 1 + rng() % 6;
    for (size_t k = 0; k < len; ++k) text += words[rng() % words.size()] + " ";
    d.push_back({"d" + std::to_string(i), text});
  }
  return testing::MakeCorpus(d);
}

Preference RandomPreference(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {"alpha", "bravo", "charlie", "delta", "echo",
                                                 "golf",  "hotel", "india",   "zulu",  "alpha bravo"};
  Preference p;
  const size_t k = 1 + rng() % 3;
  for (size_t c = 0; c < k; ++c) {
    Concept con = C("c" + std::to_string(c), {});
    const size_t m = 1 + rng() % 3;
    for (size_t j = 0; j < m; ++j) con.members.push_back(words[rng() % words.size()]);
    con.weight = 0.1 + static_cast<double>(rng() % 100) / 20.0;
    p.concepts.push_back(con);
  }
  return p;
}

TEST(Property, RankMatchesOracleScaleInvariantAndSerial) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Corpus c = RandomCorpus(rng, 1 + rng() % 10);
    Preference p = RandomPreference(rng);
    const auto oracle = testing::BruteForceScores(p, c);
    const auto ranked = Rank(p, c, 100);
    size_t positive = 0;
    for (double s : oracle) positive += s > 0;
    ASSERT_EQ(ranked.size(), positive);
    for (const auto& r : ranked) {
      EXPECT_NEAR(r.score, oracle[r.doc], 1e-9);
      EXPECT_GE(r.score, 0.0);
    }
    const auto serial = RankSerial(p, c, 100);
    ASSERT_EQ(serial.size(), ranked.size());
    for (size_t i = 0; i < ranked.size(); ++i) {
      EXPECT_EQ(serial[i].doc_id, ranked[i].doc_id);
      EXPECT_EQ(serial[i].score, ranked[i].score);
    }
    Preference doubled = p;
    for (auto& con : doubled.concepts) con.weight *= 2;
    const auto scaled = Rank(doubled, c, 100);
    ASSERT_EQ(scaled.size(), ranked.size());
    for (size_t i = 0; i < ranked.size(); ++i) EXPECT_EQ(scaled[i].doc_id, ranked[i].doc_id);
  }
}

TEST(Rank, SubsetRestricts) {
  const Preference p{{C("a", {"hospital"})}};
  const auto r = RankSubset(p, Toy(), {1}, 10);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].doc_id, "2");
}

TEST(ConceptRule, ParseRender) {
  const ConceptExpr e = ParseConceptRule("[Hospital AND Health] OR [HealthCare AND Budget]");
  EXPECT_EQ(e.kind, ConceptExpr::Kind::kOr);
  EXPECT_EQ(RenderConceptRule(ParseConceptRule(RenderConceptRule(e))), RenderConceptRule(e));
  EXPECT_EQ(ConceptNames(e).size(), 4u);
  EXPECT_THROW(ParseConceptRule("NOT Hospital"), Error);
  EXPECT_THROW(ParseConceptRule("[Hospital AND"), Error);
}

TEST(ConceptRule, FilterAndRank) {
  const Corpus c = testing::MakeCorpus({{"1", "hospital visit"},
                                        {"2", "hospital health crisis"},
                                        {"3", "medicare funding"},
                                        {"4", "nothing relevant"}});
  const std::map<std::string, Concept> defs = {{"Hospital", C("Hospital", {"hospital"})},
                                               {"Health", C("Health", {"health", "crisis"})},
                                               {"HealthCare", C("HealthCare", {"medicare"})},
                                               {"Budget", C("Budget", {"funding", "money"})}};
  const ConceptResolver resolve = [&](const std::string& n) -> std::optional<Concept> {
    auto it = defs.find(n);
    if (it == defs.end()) return std::nullopt;
    return it->second;
  };
  const auto r = EvalConceptRule(ParseConceptRule("[Hospital AND Health] OR [HealthCare AND Budget]"),
                                 c, resolve, 10);
  std::set<std::string> ids;
  for (const auto& x : r) ids.insert(x.doc_id);
  EXPECT_EQ(ids, (std::set<std::string>{"2", "3"}));
  const auto single = EvalConceptRule(ParseConceptRule("Hospital"), c, resolve, 10);
  ASSERT_EQ(single.size(), 2u);
  EXPECT_THROW(EvalConceptRule(ParseConceptRule("Unknown"), c, resolve, 10), Error);
}

// Filter soundness: every returned document satisfies the expression and no
// satisfying document with a positive score is missing.
TEST(ConceptRule, FilterSoundnessProperty) {
  std::mt19937_64 rng(41);
  const std::vector<std::string> names = {"A", "B", "C"};
  for (int trial = 0; trial < 100; ++trial) {
    const Corpus c = RandomCorpus(rng, 10);
    std::map<std::string, Concept> defs;
    for (const auto& n : names) {
      Preference p = RandomPreference(rng);
      defs[n] = C(n, p.concepts[0].members);
    }
    const ConceptResolver resolve = [&](const std::string& n) -> std::optional<Concept> {
      return defs.at(n);
    };
    const std::string text = names[rng() % 3] + (rng() % 2 ? " AND " : " OR ") + names[rng() % 3];
    const ConceptExpr e = ParseConceptRule(text);
    const auto r = EvalConceptRule(e, c, resolve, 100);
    std::set<size_t> returned;
    for (const auto& x : r) returned.insert(x.doc);
    for (size_t i = 0; i < c.size(); ++i) {
      const bool sat = EvaluateConceptExpr(e, [&](const std::string& n) {
        return DocumentContains(defs.at(n), c.view(i), c.preprocessor());
      });
      if (returned.count(i)) EXPECT_TRUE(sat) << text;
    }
  }
}

}  // namespace
}  // namespace curator
