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

#include "curator/error.h"
#include "curator/rule_lang.h"
#include "generators.h"

namespace curator {
namespace {

std::string K(const std::string& a) { return "Tweet.Keyword.Contains('" + a + "')"; }

TEST(Parse, AndOfTwoAtoms) {
  const RuleExpr e =
      ParseRule("Tweet.Keyword.Contains('Health') AND Tweet.Entity.Person('Hon Greg Hunt')");
  ASSERT_EQ(e.kind, RuleExpr::Kind::kAnd);
  ASSERT_EQ(e.children.size(), 2u);
  EXPECT_EQ(e.children[0].atom.argument, "Health");
  EXPECT_EQ(e.children[1].atom.function, FeatureFunction::kEntityPerson);
  EXPECT_EQ(e.children[1].atom.argument, "Hon Greg Hunt");
}

TEST(Parse, SingleAtom) {
  const RuleExpr e = ParseRule(K("x"));
  EXPECT_EQ(e.kind, RuleExpr::Kind::kAtom);
  EXPECT_EQ(e.atom.argument, "x");
}

TEST(Parse, BracketedDisjunction) {
  const RuleExpr e = ParseRule("[" + K("a") + " AND " + K("b") + "] OR [" + K("c") + " AND " +
                               K("d") + "]");
  ASSERT_EQ(e.kind, RuleExpr::Kind::kOr);
  ASSERT_EQ(e.children.size(), 2u);
  EXPECT_EQ(e.children[0].kind, RuleExpr::Kind::kAnd);
  EXPECT_EQ(e.children[1].kind, RuleExpr::Kind::kAnd);
}

TEST(Parse, Precedence) {
  // NOT > AND > OR
  const RuleExpr e = ParseRule(K("a") + " OR " + K("b") + " AND NOT " + K("c"));
  ASSERT_EQ(e.kind, RuleExpr::Kind::kOr);
  ASSERT_EQ(e.children[1].kind, RuleExpr::Kind::kAnd);
  EXPECT_EQ(e.children[1].children[1].kind, RuleExpr::Kind::kNot);
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    ParseRule(K("a") + " AND ");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_GE(e.offset(), K("a").size());
    EXPECT_FALSE(e.expected().empty());
  }
  EXPECT_THROW(ParseRule("Tweet.Keyword.Matches('a')"), ParseError);
  EXPECT_THROW(ParseRule("Tweet.Keyword.Contains('a'"), ParseError);
  EXPECT_THROW(ParseRule("Tweet.Keyword.InGroup('a')"), Error);
}

TEST(Dnf, Distribution) {
  const RuleTree t =
      ToDnf(ParseRule("(" + K("a") + " OR " + K("b") + ") AND " + K("c")), Tag{"x"});
  EXPECT_EQ(Render(t), "[" + K("a") + " AND " + K("c") + "] OR [" + K("b") + " AND " + K("c") + "]");
}

TEST(Dnf, NegatedLiteral) {
  const RuleTree t = ToDnf(ParseRule(K("a") + " AND NOT " + K("b")), Tag{"x"});
  const auto paths = EnumeratePaths(t);
  ASSERT_EQ(paths.size(), 1u);
  ASSERT_EQ(paths[0].features.size(), 2u);
  EXPECT_TRUE(paths[0].features[1].negated);
}

TEST(Dnf, SharedPrefixTree) {
  const RuleExpr e = ParseRule(K("a") + " AND (" + K("b") + " OR " + K("c") + ")");
  const RuleTree t = ToDnf(e, Tag{"x"});
  ASSERT_EQ(t.roots().size(), 1u);
  EXPECT_EQ(t.roots()[0].children.size(), 2u);
  for (int m = 0; m < 8; ++m) {
    const std::map<std::string, bool> v = {{"a", m & 1}, {"b", (m >> 1) & 1}, {"c", (m >> 2) & 1}};
    EXPECT_EQ(testing::TreeValue(t, v), testing::ExprValue(e, v));
  }
}

TEST(Dnf, RejectsUnsatisfiableAndOverflow) {
  EXPECT_THROW(ToDnf(ParseRule(K("a") + " AND NOT " + K("a")), Tag{"x"}), Error);
  EXPECT_THROW(ToDnf(ParseRule("NOT " + K("a")), Tag{"x"}), Error);
  DnfOptions small;
  small.children_cap = 2;
  EXPECT_THROW(ToDnf(ParseRule(K("a") + " OR " + K("b") + " OR " + K("c")), Tag{"x"}, small),
               Error);
  DnfOptions shallow;
  shallow.max_depth = 2;
  EXPECT_THROW(
      ToDnf(ParseRule(K("a") + " AND " + K("b") + " AND " + K("c")), Tag{"x"}, shallow), Error);
}

TEST(Render, Examples) {
  RuleTree t("r", Tag{"x"}, 10);
  const int a = t.AddNode(std::nullopt, KeywordFeature("a"));
  t.AddNode(a, KeywordFeature("b"));
  EXPECT_EQ(Render(t), "[" + K("a") + " AND " + K("b") + "]");
  t.AddNode(a, KeywordFeature("c"));
  EXPECT_EQ(Render(t), "[" + K("a") + " AND " + K("b") + "] OR [" + K("a") + " AND " + K("c") + "]");
}

TEST(RuleFile, RoundTrip) {
  const RuleFile f = ParseRuleFile("tag: health\n" + K("mental") + " AND " + K("service") + "\n");
  EXPECT_EQ(f.tag.label, "health");
  const RuleTree t = ToDnf(f.expr, f.tag);
  const RuleFile g = ParseRuleFile(RenderRuleFile(t));
  EXPECT_EQ(Render(ToDnf(g.expr, g.tag)), Render(t));
  EXPECT_THROW(ParseRuleFile(K("a")), ParseError);
}

// Truth-table equality of expression and its DNF tree.
TEST(Property, DnfEquivalence) {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 200) {
    const RuleExpr e = testing::RandomExpr(rng, 3, 6);
    RuleTree t;
    try {
      t = ToDnf(e, Tag{"x"}, DnfOptions{64, 64, 4096});
    } catch (const Error&) {
      continue;  // unsatisfiable or purely negative disjunct
    }
    for (int m = 0; m < 64; ++m) {
      std::map<std::string, bool> v;
      for (int i = 0; i < 6; ++i) v[testing::AtomNames()[i]] = (m >> i) & 1;
      ASSERT_EQ(testing::TreeValue(t, v), testing::ExprValue(e, v)) << testing::ExprText(e);
    }
    ++checked;
  }
}

TEST(Property, ParsedTextMatchesExpression) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const RuleExpr e = testing::RandomExpr(rng, 3, 6);
    const RuleExpr p = ParseRule(testing::ExprText(e));
    for (int m = 0; m < 64; ++m) {
      std::map<std::string, bool> v;
      for (int k = 0; k < 6; ++k) v[testing::AtomNames()[k]] = (m >> k) & 1;
      ASSERT_EQ(testing::ExprValue(p, v), testing::ExprValue(e, v));
    }
  }
}

TEST(Property, RenderParseIdempotent) {
  std::mt19937_64 rng(13);
  int checked = 0;
  while (checked < 200) {
    const RuleTree t = testing::RandomTree(rng, 1 + static_cast<int>(rng() % 12), 4);
    if (t.NodeCount() == 0 || testing::HasAbsorbedPath(t)) continue;
    const std::string text = Render(t);
    const RuleTree back = ToDnf(ParseRule(text), t.tag(), DnfOptions{4, 16, 4096});
    ASSERT_EQ(Render(back), text);
    ASSERT_EQ(testing::PathSet(back), testing::PathSet(t));
    ++checked;
  }
}

}  // namespace
}  // namespace curator
