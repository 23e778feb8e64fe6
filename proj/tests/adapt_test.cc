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

#include <sstream>

#include "curator/adapt.h"
#include "curator/error.h"
#include "curator/knowledge.h"
#include "curator/rule_lang.h"
#include "curator/synth.h"
#include "generators.h"
#include "test_util.h"

namespace curator {
namespace {

// Tree f1 -> {a, b, c} with per-node counts.
struct SiblingFixture {
  RuleTree rule{"r", Tag{"t"}, 10};
  int f1, a, b, c;
  SiblingFixture() {
    f1 = rule.AddNode(std::nullopt, KeywordFeature("f1"));
    a = rule.AddNode(f1, KeywordFeature("a"));
    b = rule.AddNode(f1, KeywordFeature("b"));
    c = rule.AddNode(f1, KeywordFeature("c"));
  }
};

TEST(Precision, Examples) {
  EXPECT_NEAR(*Precision({6, 4}), 0.6, 1e-12);
  EXPECT_FALSE(Precision({0, 0}).has_value());
  EXPECT_DOUBLE_EQ(*Precision({5, 0}), 1.0);
  AnnotationBatch batch;
  batch.entries = {{0, "d1", {"p2"}}, {1, "d2", {"p2", "p3"}}, {2, "d3", {"p3"}}};
  const std::map<std::string, Verdict> v = {
      {"d1", Verdict::kRelevant}, {"d2", Verdict::kIrrelevant}, {"d3", Verdict::kUnknown}};
  EXPECT_NEAR(*PathPrecision(v, "p2", batch), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(*PathPrecision(v, "p3", batch), 0.0);
  EXPECT_FALSE(PathPrecision(v, "p9", batch).has_value());
}

TEST(Decide, SiblingMeanRule) {
  SiblingFixture f;
  const std::map<int, size_t> counts = {{f.f1, 200}, {f.a, 100}, {f.b, 80}, {f.c, 20}};
  std::map<std::string, std::optional<double>> prec;
  for (int id : {f.a, f.b, f.c}) prec[PathIdForLeaf(id)] = 0.6;
  const AdaptationPlan plan = DecideActions(f.rule, counts, prec, AdaptConfig{});
  std::map<int, ActionType> by_node;
  for (const auto& act : plan.actions) by_node[act.node_id] = act.type;
  ASSERT_EQ(by_node.size(), 3u);
  EXPECT_EQ(by_node[f.c], ActionType::kReplace);
  EXPECT_EQ(by_node[f.a], ActionType::kRestrict);
  EXPECT_EQ(by_node[f.b], ActionType::kRestrict);
}

TEST(Decide, PrecisePathsAndMissingEstimates) {
  SiblingFixture f;
  const std::map<int, size_t> counts = {{f.f1, 200}, {f.a, 100}, {f.b, 80}, {f.c, 20}};
  std::map<std::string, std::optional<double>> prec;
  for (int id : {f.a, f.b, f.c}) prec[PathIdForLeaf(id)] = 0.9;
  EXPECT_TRUE(DecideActions(f.rule, counts, prec, AdaptConfig{}).actions.empty());
  prec[PathIdForLeaf(f.a)] = std::nullopt;
  prec[PathIdForLeaf(f.b)] = 0.6;
  const AdaptationPlan plan = DecideActions(f.rule, counts, prec, AdaptConfig{});
  ASSERT_EQ(plan.actions.size(), 1u);
  EXPECT_EQ(plan.actions[0].node_id, f.b);
  EXPECT_EQ(plan.actions[0].type, ActionType::kRestrict);
}

// Plan soundness: every action targets a node on an imprecise path; replaced
// nodes are never on a precise path; nothing targets the inside of a replaced
// subtree.
TEST(Decide, PlanSoundnessProperty) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    RuleTree t("r", Tag{"t"}, 4);
    std::vector<int> ids;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      std::optional<int> parent;
      if (!ids.empty() && rng() % 5) parent = ids[rng() % ids.size()];
      try {
        ids.push_back(t.AddNode(parent, KeywordFeature("w" + std::to_string(i))));
      } catch (const Error&) {
      }
    }
    std::map<int, size_t> counts;
    for (int id : ids) counts[id] = rng() % 50;
    std::map<std::string, std::optional<double>> prec;
    const auto paths = EnumeratePaths(t);
    for (const auto& p : paths) {
      prec[p.path_id] = rng() % 4 == 0 ? std::optional<double>() : (rng() % 100) / 100.0;
    }
    const AdaptationPlan plan = DecideActions(t, counts, prec, AdaptConfig{});
    std::set<int> on_precise, on_imprecise;
    for (const auto& p : paths) {
      const auto& v = prec[p.path_id];
      for (int id : p.node_ids) {
        if (v && *v >= 0.75) on_precise.insert(id);
        if (v && *v < 0.75) on_imprecise.insert(id);
      }
    }
    std::set<int> replaced;
    for (const auto& a : plan.actions)
      if (a.type == ActionType::kReplace) replaced.insert(a.node_id);
    for (const auto& a : plan.actions) {
      EXPECT_TRUE(on_imprecise.count(a.node_id));
      if (a.type == ActionType::kReplace) {
        EXPECT_FALSE(on_precise.count(a.node_id));
        EXPECT_TRUE(t.ParentOf(a.node_id).has_value());
      }
      for (auto p = t.ParentOf(a.node_id); p; p = t.ParentOf(*p)) EXPECT_FALSE(replaced.count(*p));
    }
  }
}

std::map<std::string, Feature> ArmsOf(const std::vector<Feature>& fs) {
  std::map<std::string, Feature> m;
  for (const auto& f : fs) m[f.Key()] = f;
  return m;
}

TEST(AdaptRule, RestrictThenReplace) {
  RuleTree rule("r", Tag{"t"}, 10);
  const int f1 = rule.AddNode(std::nullopt, KeywordFeature("f1"));
  const Feature f2 = KeywordFeature("f2"), f3 = KeywordFeature("f3"), f4 = KeywordFeature("f4"),
                f5 = KeywordFeature("f5");
  const auto arms = ArmsOf({f2, f3, f4, f5});
  ThetaEstimate theta;
  theta.theta = {{f2.Key(), 0.9}, {f3.Key(), 0.8}, {f4.Key(), 0.3}, {f5.Key(), 0.1}};
  AdaptConfig cfg;
  cfg.children_cap = 2;
  std::set<std::string> retired;
  AdaptationLog log;
  const RuleTree b = AdaptRule(rule, {{{ActionType::kRestrict, f1, PathIdForLeaf(f1)}}}, theta,
                               arms, cfg, &retired, &log);
  EXPECT_EQ(Render(b), "[Tweet.Keyword.Contains('f1') AND Tweet.Keyword.Contains('f2')] OR "
                       "[Tweet.Keyword.Contains('f1') AND Tweet.Keyword.Contains('f3')]");
  int f2_node = 0;
  for (const auto& n : b.roots()[0].children)
    if (n.feature == f2) f2_node = n.id;
  AdaptationLog log2;
  const RuleTree c = AdaptRule(b, {{{ActionType::kReplace, f2_node, PathIdForLeaf(f2_node)}}},
                               theta, arms, cfg, &retired, &log2);
  EXPECT_EQ(testing::PathSet(c),
            testing::PathSet(ToDnf(ParseRule("[Tweet.Keyword.Contains('f1') AND "
                                             "Tweet.Keyword.Contains('f4')] OR "
                                             "[Tweet.Keyword.Contains('f1') AND "
                                             "Tweet.Keyword.Contains('f3')]"),
                                   Tag{"t"})));
  EXPECT_TRUE(retired.count(f2.Key()));
}

TEST(AdaptRule, EmptyPlanIsIdentity) {
  SiblingFixture f;
  std::set<std::string> retired;
  AdaptationLog log;
  const RuleTree out = AdaptRule(f.rule, {}, {}, {}, AdaptConfig{}, &retired, &log);
  EXPECT_EQ(Render(out), Render(f.rule));
  EXPECT_TRUE(log.actions.empty());
}

TEST(Stability, WindowExamples) {
  const std::vector<double> s = {0.60, 0.62, 0.61, 0.64};
  const auto q = SlidingMeans(s, 3);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_NEAR(q[0], 0.610, 1e-12);
  EXPECT_NEAR(q[1], 0.6233333333333333, 1e-12);
  EXPECT_TRUE(IsStabilized(s, 3, 0.01));
  EXPECT_FALSE(IsStabilized({0.80, 0.70, 0.60, 0.50}, 3, 0.01));
  EXPECT_FALSE(IsStabilized({0.6, 0.6, 0.6}, 3, 0.01));
  StabilityWindow w(3, 0.01);
  EXPECT_FALSE(w.Update("p", 0.60));
  EXPECT_FALSE(w.Update("p", 0.62));
  EXPECT_FALSE(w.Update("p", 0.61));
  EXPECT_TRUE(w.Update("p", 0.64));
}

TEST(Prf, Examples) {
  PrfMetrics m = ComputePrf(8, 2, 2);
  EXPECT_NEAR(*m.precision, 0.8, 1e-12);
  EXPECT_NEAR(*m.recall, 0.8, 1e-12);
  EXPECT_NEAR(*m.f1, 0.8, 1e-12);
  EXPECT_FALSE(ComputePrf(0, 0, 3).precision.has_value());
  m = ComputePrf(10, 0, 0);
  EXPECT_DOUBLE_EQ(*m.precision, 1.0);
  EXPECT_DOUBLE_EQ(*m.recall, 1.0);
  EXPECT_DOUBLE_EQ(*m.f1, 1.0);
}

TEST(Config, SetAndValidate) {
  AdaptConfig c;
  c.Set("k", "5");
  c.Set("precision_threshold", "0.8");
  EXPECT_EQ(c.children_cap, 5);
  EXPECT_DOUBLE_EQ(c.precision_threshold, 0.8);
  EXPECT_THROW(c.Set("bogus", "1"), Error);
  c.Set("sample_rate", "2");
  EXPECT_THROW(c.Validate(), Error);
  c.sample_rate = 0;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(Candidates, ConceptualAndSyntactic) {
  const Corpus corpus = testing::MakeCorpus(
      {{"1", "health fund illness"}, {"2", "health budget disease"}, {"3", "sport"}});
  KnowledgeBase kb;
  std::istringstream hyp("fund\tEconomy\nbudget\tEconomy\nillness\tHealth\ndisease\tHealth\n");
  kb.set_hypernyms(Lexicon::Parse(hyp, "h"));
  RuleTree rule("r", Tag{"t"}, 10);
  rule.AddNode(std::nullopt, KeywordFeature("health"));
  const AnnotationBatch batch = AnnotateCorpus(rule, corpus, 1, nullptr);
  ASSERT_EQ(batch.entries.size(), 2u);
  const CandidateSet c = ExtractCandidates(batch, corpus, &kb, rule, true);
  EXPECT_EQ(c.syntactic.size(), 4u);
  ASSERT_EQ(c.conceptual.size(), 2u);
  std::set<std::string> labels;
  for (const auto& g : c.conceptual) labels.insert(g.group.label);
  EXPECT_EQ(labels, (std::set<std::string>{"Economy", "Health"}));
  EXPECT_EQ(c.item_syntactic.size(), 2u);
  EXPECT_TRUE(ExtractCandidates(batch, corpus, &kb, rule, false).conceptual.empty());
}

TEST(Candidates, SingleNovelTokenAndExclusion) {
  const Corpus corpus = testing::MakeCorpus({{"1", "health fund"}, {"2", "other"}});
  RuleTree rule("r", Tag{"t"}, 10);
  const int h = rule.AddNode(std::nullopt, KeywordFeature("health"));
  AnnotationBatch batch = AnnotateCorpus(rule, corpus, 1, nullptr);
  CandidateSet c = ExtractCandidates(batch, corpus, nullptr, rule, false);
  ASSERT_EQ(c.syntactic.size(), 1u);
  EXPECT_EQ(c.syntactic[0].surface, "fund");
  rule.AddNode(h, KeywordFeature("fund"));
  batch = AnnotateCorpus(rule, corpus, 1, nullptr);
  EXPECT_TRUE(ExtractCandidates(batch, corpus, nullptr, rule, false).empty());
}

struct EngineFixture {
  SynthCorpus synth;
  Corpus corpus;
  KnowledgeBase kb;
  LabelSet labels;
  RuleTree seed;

  explicit EngineFixture(size_t docs = 4000, uint64_t seed_value = 3) {
    SynthParams p;
    p.docs = docs;
    p.seed = seed_value;
    synth = GenerateSynthetic(p);
    std::istringstream in(synth.corpus_jsonl);
    corpus.Ingest(in);
    std::istringstream hyp(synth.hypernyms_tsv), gaz(synth.gazetteer_tsv), lab(synth.labels_jsonl);
    kb.set_hypernyms(Lexicon::Parse(hyp, "h"));
    kb.set_gazetteer(Gazetteer::Parse(gaz, "g"));
    kb.AttachEntities(&corpus);
    labels = LabelSet::Parse(lab);
    const RuleFile f = ParseRuleFile(synth.seed_rule);
    seed = ToDnf(f.expr, f.tag, DnfOptions{}, "r1");
  }
};

class ThrowingSource : public FeedbackSource {
 public:
  std::vector<Verdict> Collect(const std::vector<LabelTask>&) override {
    throw Unavailable("crowd offline");
  }
  const char* name() const override { return "throwing"; }
};

TEST(Engine, RoundIsAtomic) {
  EngineFixture fx;
  AdaptEngine engine(&fx.corpus, &fx.kb, fx.seed, AdaptConfig{});
  OracleSource oracle(&fx.labels);
  engine.RunRound(oracle);
  const auto before = engine.StateJson();
  ThrowingSource bad;
  EXPECT_THROW(engine.RunRound(bad), Error);
  EXPECT_EQ(engine.StateJson(), before);
  const PendingRound p = engine.PrepareRound();
  ASSERT_FALSE(p.tasks.empty());
  EXPECT_THROW(engine.CompleteRound(p, {}), Error);  // size mismatch
  EXPECT_EQ(engine.StateJson(), before);
  const auto report = engine.CompleteRound(p, oracle.Collect(p.tasks));
  EXPECT_EQ(report.round, 2);
  EXPECT_THROW(engine.CompleteRound(p, oracle.Collect(p.tasks)), Error);  // stale
}

TEST(Engine, ReportAccounting) {
  EngineFixture fx;
  AdaptConfig cfg;
  cfg.cost_per_verdict = 0.5;
  AdaptEngine engine(&fx.corpus, &fx.kb, fx.seed, cfg);
  engine.set_labels(&fx.labels);
  OracleSource oracle(&fx.labels);
  const RoundReport r = engine.RunRound(oracle);
  EXPECT_EQ(r.sample_size, SampleSize(cfg.sample_rate, r.population));
  EXPECT_EQ(r.relevant + r.irrelevant + r.unknown, r.sample_size);
  EXPECT_DOUBLE_EQ(r.cost, 0.5 * static_cast<double>(r.sample_size));
  EXPECT_TRUE(r.labeled_precision.has_value());
  EXPECT_EQ(r.rule_before, Render(fx.seed));
  EXPECT_EQ(engine.next_round(), 2);
  // Ledger totals equal the verdict counts applied through item features.
  uint64_t total = 0;
  for (const auto& [k, e] : engine.ledger().entries()) total += e.counts.total();
  EXPECT_GT(total, 0u);
}

TEST(Engine, ZeroAnnotationRound) {
  EngineFixture fx(1000);
  RuleTree none("r", Tag{fx.synth.tag}, 10);
  none.AddNode(std::nullopt, KeywordFeature("zzzzqqq"));
  AdaptEngine engine(&fx.corpus, &fx.kb, none, AdaptConfig{});
  OracleSource oracle(&fx.labels);
  const RoundReport r = engine.RunRound(oracle);
  EXPECT_EQ(r.items_annotated, 0u);
  EXPECT_EQ(r.sample_size, 0u);
  EXPECT_TRUE(r.actions.empty());
  EXPECT_EQ(Render(engine.rule()), Render(none));
}

TEST(Engine, StabilizedPathsIssueNoTasks) {
  EngineFixture fx(2000);
  AdaptConfig cfg;
  cfg.window = 2;
  cfg.epsilon = 1.0;  // any history of three values is stable
  cfg.precision_threshold = 1e-6;  // never adapt
  AdaptEngine engine(&fx.corpus, &fx.kb, fx.seed, cfg);
  OracleSource oracle(&fx.labels);
  for (int i = 0; i < 3; ++i) engine.RunRound(oracle);
  EXPECT_EQ(engine.stabilized().size(), EnumeratePaths(engine.rule()).size());
  const PendingRound p = engine.PrepareRound();
  EXPECT_TRUE(p.tasks.empty());
  const RoundReport r = engine.CompleteRound(p, {});
  EXPECT_EQ(r.sample_size, 0u);
}

TEST(Engine, OracleRoundsImprovePrecision) {
  EngineFixture fx(20000, 4);
  AdaptEngine engine(&fx.corpus, &fx.kb, fx.seed, AdaptConfig{});
  OracleSource oracle(&fx.labels);
  const auto before = EvaluateRule(engine.rule(), fx.corpus, fx.labels, engine.concepts());
  for (int i = 0; i < 5; ++i) engine.RunRound(oracle);
  const auto after = EvaluateRule(engine.rule(), fx.corpus, fx.labels, engine.concepts());
  ASSERT_TRUE(before.precision && after.precision);
  EXPECT_GT(*after.precision, *before.precision);
  EXPECT_NO_THROW(engine.rule().Validate());
}

}  // namespace
}  // namespace curator
