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

#ifndef CURATOR_RULE_LANG_H_
#define CURATOR_RULE_LANG_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "curator/error.h"
#include "curator/rule.h"

namespace curator {

// Boolean expression over features, mirroring source structure.
struct RuleExpr {
  enum class Kind { kAtom, kAnd, kOr, kNot };
  Kind kind = Kind::kAtom;
  Feature atom;                    // kAtom
  std::vector<RuleExpr> children;  // kAnd / kOr (>= 2), kNot (1)

  static RuleExpr Atom(Feature f);
  static RuleExpr And(std::vector<RuleExpr> c);
  static RuleExpr Or(std::vector<RuleExpr> c);
  static RuleExpr Not(RuleExpr c);
};

class ParseError : public Error {
 public:
  ParseError(size_t offset, size_t line, size_t column, std::vector<std::string> expected,
             const std::string& message);

  size_t offset() const { return offset_; }
  size_t line() const { return line_; }
  size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& message() const { return message_; }

 private:
  size_t offset_, line_, column_;
  std::string message_;
  std::vector<std::string> expected_;
};

// Grammar (keywords case-insensitive; NOT binds tighter than AND, AND than OR):
//
//   expr    ::= and { "OR" and }
//   and     ::= unary { "AND" unary }
//   unary   ::= "NOT" unary | "[" expr "]" | feature
//   feature ::= ident "." ident "." ident "(" string ")"
//   string  ::= '...' | "..."   (backslash escapes)
//
// Functions: Keyword, Hashtag (Contains | Exact); Topic, Category (InGroup,
// Contains accepted as an alias); Entity (Person | Organization | Location).
RuleExpr ParseRule(std::string_view text);

struct DnfOptions {
  int children_cap = 10;  // K
  int max_depth = 8;      // longest conjunction
  size_t max_disjuncts = 4096;
};

// Normalizes to disjunctive form and builds a tree sharing common prefixes.
RuleTree ToDnf(const RuleExpr& expr, const Tag& tag, const DnfOptions& options = {},
               std::string rule_id = "rule");

// Canonical fully bracketed DNF text, one bracket group per path.
std::string Render(const RuleTree& rule);
std::string RenderFeature(const Feature& f);

// Truth value of `expr` given a truth value per feature key (negation
// excluded from the key). Used by tests and the concept-rule evaluator.
bool EvaluateExpr(const RuleExpr& expr,
                  const std::function<bool(const Feature&)>& atom_value);

// Rule files: first line `tag: <label>`, remainder the expression.
struct RuleFile {
  Tag tag;
  RuleExpr expr;
};
RuleFile ParseRuleFile(std::string_view text);
RuleTree LoadRuleFile(const std::string& path, const DnfOptions& options = {},
                      std::string rule_id = "rule");
std::string RenderRuleFile(const RuleTree& rule);

}  // namespace curator

#endif  // CURATOR_RULE_LANG_H_
