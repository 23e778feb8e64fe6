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

#include "curator/rule_lang.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace curator {

RuleExpr RuleExpr::Atom(Feature f) {
  RuleExpr e;
  e.kind = Kind::kAtom;
  e.atom = std::move(f);
  return e;
}

RuleExpr RuleExpr::And(std::vector<RuleExpr> c) {
  RuleExpr e;
  e.kind = Kind::kAnd;
  e.children = std::move(c);
  return e;
}

RuleExpr RuleExpr::Or(std::vector<RuleExpr> c) {
  RuleExpr e;
  e.kind = Kind::kOr;
  e.children = std::move(c);
  return e;
}

RuleExpr RuleExpr::Not(RuleExpr c) {
  RuleExpr e;
  e.kind = Kind::kNot;
  e.children.push_back(std::move(c));
  return e;
}

namespace {

std::string JoinExpected(const std::vector<std::string>& expected) {
  std::string s;
  for (size_t i = 0; i < expected.size(); ++i) {
    if (i) s += ", ";
    s += expected[i];
  }
  return s;
}

}  // namespace

ParseError::ParseError(size_t offset, size_t line, size_t column,
                       std::vector<std::string> expected, const std::string& message)
    : Error(ErrorCode::kInvalidArgument,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                message + (expected.empty() ? "" : " (expected " + JoinExpected(expected) + ")")),
      offset_(offset),
      line_(line),
      column_(column),
      message_(message),
      expected_(std::move(expected)) {}

// -- Parser ------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  RuleExpr ParseAll() {
    RuleExpr e = ParseOr();
    SkipSpace();
    if (pos_ < text_.size()) {
      Fail({"AND", "OR", "end of input"}, "unexpected " + Describe());
    }
    return e;
  }

 private:
  [[noreturn]] void Fail(std::vector<std::string> expected, const std::string& message) {
    FailAt(pos_, std::move(expected), message);
  }

  [[noreturn]] void FailAt(size_t offset, std::vector<std::string> expected,
                           const std::string& message) {
    offset = std::min(offset, text_.size());
    size_t line = 1, column = 1;
    for (size_t i = 0; i < offset; ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(offset, line, column, std::move(expected), message);
  }

  std::string Describe() const {
    if (pos_ >= text_.size()) return "end of input";
    size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end])) &&
           end - pos_ < 16) {
      ++end;
    }
    return "`" + std::string(text_.substr(pos_, std::max<size_t>(end - pos_, 1))) + "`";
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static bool IdentChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  // Peeks a case-insensitive keyword that is not followed by an identifier
  // character (so `Orders.Keyword...` is not the OR operator).
  bool PeekKeyword(std::string_view kw) {
    SkipSpace();
    if (pos_ + kw.size() > text_.size()) return false;
    for (size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    }
    const size_t after = pos_ + kw.size();
    return after == text_.size() || !(IdentChar(text_[after]) || text_[after] == '.');
  }

  RuleExpr ParseOr() {
    std::vector<RuleExpr> terms;
    terms.push_back(ParseAnd());
    while (PeekKeyword("OR")) {
      pos_ += 2;
      terms.push_back(ParseAnd());
    }
    return terms.size() == 1 ? std::move(terms[0]) : RuleExpr::Or(std::move(terms));
  }

  RuleExpr ParseAnd() {
    std::vector<RuleExpr> terms;
    terms.push_back(ParseUnary());
    while (PeekKeyword("AND")) {
      pos_ += 3;
      terms.push_back(ParseUnary());
    }
    return terms.size() == 1 ? std::move(terms[0]) : RuleExpr::And(std::move(terms));
  }

  RuleExpr ParseUnary() {
    if (PeekKeyword("NOT")) {
      pos_ += 3;
      return RuleExpr::Not(ParseUnary());
    }
    SkipSpace();
    if (pos_ < text_.size() && (text_[pos_] == '[' || text_[pos_] == '(')) {
      const char close = text_[pos_] == '[' ? ']' : ')';
      ++pos_;
      RuleExpr inner = ParseOr();
      SkipSpace();
      if (pos_ >= text_.size() || text_[pos_] != close) {
        Fail({std::string(1, close), "AND", "OR"}, "unclosed bracket, found " + Describe());
      }
      ++pos_;
      return inner;
    }
    return RuleExpr::Atom(ParseFeature());
  }

  std::string ParseIdent(const char* what) {
    SkipSpace();
    const size_t start = pos_;
    while (pos_ < text_.size() && IdentChar(text_[pos_])) ++pos_;
    if (pos_ == start) Fail({what}, "found " + Describe());
    return std::string(text_.substr(start, pos_ - start));
  }

  void Expect(char c) {
    SkipSpace();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      Fail({std::string("`") + c + "`"}, "found " + Describe());
    }
    ++pos_;
  }

  std::string ParseString() {
    SkipSpace();
    if (pos_ >= text_.size() || (text_[pos_] != '\'' && text_[pos_] != '"')) {
      Fail({"quoted string"}, "found " + Describe());
    }
    const size_t start = pos_;
    const char quote = text_[pos_++];
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) FailAt(start, {"closing quote"}, "unterminated string");
      const char c = text_[pos_++];
      if (c == quote) break;
      if (c == '\\') {
        if (pos_ >= text_.size()) FailAt(start, {"closing quote"}, "unterminated string");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: out.push_back(e);
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  Feature ParseFeature() {
    SkipSpace();
    Feature f;
    const size_t start = pos_;
    f.dataset = ParseIdent("feature (Dataset.Function.Operator)");
    Expect('.');
    const size_t function_pos = pos_;
    const std::string function = ToLower(ParseIdent("function name"));
    Expect('.');
    const size_t op_pos = pos_;
    const std::string op = ToLower(ParseIdent("operator name"));

    static const std::vector<std::string> kFunctions = {
        "Keyword", "Hashtag", "Topic", "Category", "Entity"};
    if (function == "entity") {
      if (op == "person") {
        f.function = FeatureFunction::kEntityPerson;
      } else if (op == "organization" || op == "org") {
        f.function = FeatureFunction::kEntityOrg;
      } else if (op == "location") {
        f.function = FeatureFunction::kEntityLocation;
      } else {
        FailAt(op_pos, {"Person", "Organization", "Location"}, "unknown entity kind `" + op + "`");
      }
      f.op = FeatureOperator::kInGroup;
    } else {
      auto fn = ParseFunctionName(function);
      if (!fn) FailAt(function_pos, kFunctions, "unknown function `" + function + "`");
      f.function = *fn;
      auto parsed_op = ParseOperatorName(op);
      const bool group = !IsCompatible(f.function, FeatureOperator::kContains);
      if (group && parsed_op == FeatureOperator::kContains) parsed_op = FeatureOperator::kInGroup;
      if (!parsed_op || !IsCompatible(f.function, *parsed_op)) {
        FailAt(op_pos,
               group ? std::vector<std::string>{"InGroup"}
                     : std::vector<std::string>{"Contains", "Exact"},
               "unknown operator `" + op + "` for function `" + function + "`");
      }
      f.op = *parsed_op;
    }
    Expect('(');
    f.argument = ParseString();
    Expect(')');
    if (Trim(f.argument).empty()) FailAt(start, {"non-empty argument"}, "empty feature argument");
    return f;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

// -- Normalization -------------------------------------------------------------

using Conjunct = std::vector<Feature>;

// Negation-normal form: NOT only wraps atoms (folded into Feature::negated).
RuleExpr ToNnf(const RuleExpr& e, bool negate) {
  switch (e.kind) {
    case RuleExpr::Kind::kAtom: {
      Feature f = e.atom;
      if (negate) f.negated = !f.negated;
      return RuleExpr::Atom(std::move(f));
    }
    case RuleExpr::Kind::kNot:
      return ToNnf(e.children[0], !negate);
    case RuleExpr::Kind::kAnd:
    case RuleExpr::Kind::kOr: {
      std::vector<RuleExpr> c;
      for (const auto& child : e.children) c.push_back(ToNnf(child, negate));
      const bool is_and = (e.kind == RuleExpr::Kind::kAnd) != negate;
      return is_and ? RuleExpr::And(std::move(c)) : RuleExpr::Or(std::move(c));
    }
  }
  return e;
}

std::vector<Conjunct> Distribute(const RuleExpr& e, size_t limit) {
  switch (e.kind) {
    case RuleExpr::Kind::kAtom:
      return {{e.atom}};
    case RuleExpr::Kind::kOr: {
      std::vector<Conjunct> out;
      for (const auto& c : e.children) {
        auto part = Distribute(c, limit);
        out.insert(out.end(), part.begin(), part.end());
        if (out.size() > limit) {
          throw InvalidArgument("expression expands to more than " + std::to_string(limit) +
                                " disjuncts");
        }
      }
      return out;
    }
    case RuleExpr::Kind::kAnd: {
      std::vector<Conjunct> acc = {{}};
      for (const auto& c : e.children) {
        const auto part = Distribute(c, limit);
        std::vector<Conjunct> next;
        for (const auto& a : acc) {
          for (const auto& b : part) {
            Conjunct merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            next.push_back(std::move(merged));
            if (next.size() > limit) {
              throw InvalidArgument("expression expands to more than " +
                                    std::to_string(limit) + " disjuncts");
            }
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    case RuleExpr::Kind::kNot:
      break;
  }
  throw InvalidArgument("internal: NOT above atom after normalization");
}

std::string BaseKey(const Feature& f) {
  Feature base = f;
  base.negated = false;
  return base.Key();
}

// Drops repeated literals (first occurrence wins). Returns false when the
// conjunct is contradictory (f AND NOT f).
bool Simplify(Conjunct* c) {
  std::map<std::string, bool> polarity;
  Conjunct out;
  for (auto& f : *c) {
    auto [it, inserted] = polarity.emplace(BaseKey(f), f.negated);
    if (!inserted) {
      if (it->second != f.negated) return false;
      continue;
    }
    out.push_back(std::move(f));
  }
  *c = std::move(out);
  return true;
}

std::set<std::string> KeySet(const Conjunct& c) {
  std::set<std::string> s;
  for (const auto& f : c) s.insert(f.Key());
  return s;
}

}  // namespace

RuleExpr ParseRule(std::string_view text) { return Parser(text).ParseAll(); }

RuleTree ToDnf(const RuleExpr& expr, const Tag& tag, const DnfOptions& options,
               std::string rule_id) {
  std::vector<Conjunct> raw = Distribute(ToNnf(expr, false), options.max_disjuncts);

  std::vector<Conjunct> conjuncts;
  for (auto& c : raw) {
    if (Simplify(&c)) conjuncts.push_back(std::move(c));
  }
  if (conjuncts.empty()) throw InvalidArgument("rule is unsatisfiable");

  // Absorption: X OR (X AND Y) == X. Also removes set-duplicates.
  std::vector<std::set<std::string>> keys;
  for (const auto& c : conjuncts) keys.push_back(KeySet(c));
  std::vector<Conjunct> kept;
  for (size_t i = 0; i < conjuncts.size(); ++i) {
    bool absorbed = false;
    for (size_t j = 0; j < conjuncts.size() && !absorbed; ++j) {
      if (i == j) continue;
      const bool subset = std::includes(keys[i].begin(), keys[i].end(), keys[j].begin(),
                                        keys[j].end());
      if (subset && (keys[j].size() < keys[i].size() || j < i)) absorbed = true;
    }
    if (!absorbed) kept.push_back(std::move(conjuncts[i]));
  }

  RuleTree tree(std::move(rule_id), tag, options.children_cap);
  for (const auto& c : kept) {
    if (std::all_of(c.begin(), c.end(), [](const Feature& f) { return f.negated; })) {
      std::string s;
      for (const auto& f : c) s += (s.empty() ? "" : " AND ") + RenderFeature(f);
      throw InvalidArgument("disjunct has no positive feature: " + s);
    }
    if (static_cast<int>(c.size()) > options.max_depth) {
      throw InvalidArgument("disjunct of length " + std::to_string(c.size()) +
                            " exceeds depth limit " + std::to_string(options.max_depth));
    }
    std::optional<int> parent;
    for (const auto& f : c) {
      const auto& group = tree.SiblingGroup(parent);
      auto it = std::find_if(group.begin(), group.end(),
                             [&](const RuleNode& n) { return n.feature == f; });
      if (it != group.end()) {
        parent = it->id;
        continue;
      }
      if (static_cast<int>(group.size()) >= options.children_cap) {
        throw InvalidArgument("sibling overflow: more than " +
                              std::to_string(options.children_cap) + " children at one node");
      }
      parent = tree.AddNode(parent, f);
    }
  }
  tree.Validate();
  return tree;
}

// -- Rendering -------------------------------------------------------------------

namespace {

std::string Capitalize(std::string s) {
  bool up = true;
  for (char& c : s) {
    if (up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    up = c == '_';
  }
  return s;
}

std::string Quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\\' || c == '\'') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '\t') {
      out += "\\t";
      continue;
    }
    out.push_back(c);
  }
  return out + "'";
}

}  // namespace

std::string RenderFeature(const Feature& f) {
  std::string fn, op;
  switch (f.function) {
    case FeatureFunction::kEntityPerson: fn = "Entity"; op = "Person"; break;
    case FeatureFunction::kEntityOrg: fn = "Entity"; op = "Organization"; break;
    case FeatureFunction::kEntityLocation: fn = "Entity"; op = "Location"; break;
    default:
      fn = Capitalize(FunctionName(f.function));
      op = f.op == FeatureOperator::kInGroup ? "InGroup" : Capitalize(OperatorName(f.op));
  }
  std::string s = f.dataset + "." + fn + "." + op + "(" + Quote(f.argument) + ")";
  return f.negated ? "NOT " + s : s;
}

std::string Render(const RuleTree& rule) {
  std::string out;
  for (const auto& path : EnumeratePaths(rule)) {
    if (!out.empty()) out += " OR ";
    out += "[";
    for (size_t i = 0; i < path.features.size(); ++i) {
      if (i) out += " AND ";
      out += RenderFeature(path.features[i]);
    }
    out += "]";
  }
  return out;
}

bool EvaluateExpr(const RuleExpr& expr, const std::function<bool(const Feature&)>& atom_value) {
  switch (expr.kind) {
    case RuleExpr::Kind::kAtom:
      return atom_value(expr.atom) != expr.atom.negated;
    case RuleExpr::Kind::kNot:
      return !EvaluateExpr(expr.children[0], atom_value);
    case RuleExpr::Kind::kAnd:
      return std::all_of(expr.children.begin(), expr.children.end(),
                         [&](const RuleExpr& c) { return EvaluateExpr(c, atom_value); });
    case RuleExpr::Kind::kOr:
      return std::any_of(expr.children.begin(), expr.children.end(),
                         [&](const RuleExpr& c) { return EvaluateExpr(c, atom_value); });
  }
  return false;
}

RuleFile ParseRuleFile(std::string_view text) {
  const size_t nl = text.find('\n');
  const std::string first = Trim(text.substr(0, nl));
  const std::string lower = ToLower(first);
  if (lower.rfind("tag:", 0) != 0) {
    throw ParseError(0, 1, 1, {"tag: <label>"}, "rule file must start with a tag line");
  }
  RuleFile file;
  file.tag.label = Trim(first.substr(4));
  if (file.tag.label.empty()) throw ParseError(0, 1, 5, {"tag label"}, "empty tag");
  const std::string_view rest = nl == std::string_view::npos ? "" : text.substr(nl + 1);
  try {
    file.expr = ParseRule(rest);
  } catch (const ParseError& e) {
    // Report positions relative to the whole file.
    throw ParseError(e.offset() + nl + 1, e.line() + 1, e.column(), e.expected(), e.message());
  }
  return file;
}

RuleTree LoadRuleFile(const std::string& path, const DnfOptions& options, std::string rule_id) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RuleFile file = ParseRuleFile(ss.str());
  return ToDnf(file.expr, file.tag, options, std::move(rule_id));
}

std::string RenderRuleFile(const RuleTree& rule) {
  return "tag: " + rule.tag().label + "\n" + Render(rule) + "\n";
}

}  // namespace curator
