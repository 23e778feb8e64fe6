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

#include "curator/concept_rule.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "curator/error.h"
#include "curator/text.h"

namespace curator {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  ConceptExpr Parse() {
    ConceptExpr e = Or();
    Skip();
    if (pos_ != s_.size()) Fail("expected AND, OR, or end of input");
    return e;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) {
    throw InvalidArgument("concept rule at offset " + std::to_string(pos_) + ": " + what);
  }

  void Skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool Keyword(std::string_view kw) {
    Skip();
    if (s_.size() - pos_ < kw.size()) return false;
    for (size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(s_[pos_ + i])) != kw[i]) return false;
    }
    const size_t end = pos_ + kw.size();
    if (end < s_.size() && IsNameChar(s_[end])) return false;
    pos_ = end;
    return true;
  }

  static bool IsNameChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           (static_cast<unsigned char>(c) & 0x80);
  }

  ConceptExpr Or() {
    std::vector<ConceptExpr> parts{And()};
    while (Keyword("OR")) parts.push_back(And());
    if (parts.size() == 1) return std::move(parts[0]);
    return {ConceptExpr::Kind::kOr, "", std::move(parts)};
  }

  ConceptExpr And() {
    std::vector<ConceptExpr> parts{Primary()};
    while (Keyword("AND")) parts.push_back(Primary());
    if (parts.size() == 1) return std::move(parts[0]);
    return {ConceptExpr::Kind::kAnd, "", std::move(parts)};
  }

  ConceptExpr Primary() {
    Skip();
    if (pos_ >= s_.size()) Fail("expected concept name or '['");
    const char c = s_[pos_];
    if (c == '[' || c == '(') {
      const char close = c == '[' ? ']' : ')';
      ++pos_;
      ConceptExpr e = Or();
      Skip();
      if (pos_ >= s_.size() || s_[pos_] != close) Fail(std::string("expected '") + close + "'");
      ++pos_;
      return e;
    }
    if (c == '\'' || c == '"') {
      ++pos_;
      std::string name;
      while (pos_ < s_.size() && s_[pos_] != c) name += s_[pos_++];
      if (pos_ >= s_.size()) Fail("unterminated quoted name");
      ++pos_;
      if (Trim(name).empty()) Fail("empty concept name");
      return {ConceptExpr::Kind::kAtom, Trim(name), {}};
    }
    const size_t start = pos_;
    while (pos_ < s_.size() && IsNameChar(s_[pos_])) ++pos_;
    if (pos_ == start) Fail("expected concept name or '['");
    std::string name(s_.substr(start, pos_ - start));
    const std::string upper = [&] {
      std::string u = name;
      for (auto& ch : u) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      return u;
    }();
    if (upper == "AND" || upper == "OR") {
      pos_ = start;
      Fail("expected concept name before " + upper);
    }
    if (upper == "NOT") {
      pos_ = start;
      Fail("NOT is not supported in concept rules");
    }
    return {ConceptExpr::Kind::kAtom, std::move(name), {}};
  }

  std::string_view s_;
  size_t pos_ = 0;
};

void Names(const ConceptExpr& e, std::vector<std::string>* out) {
  if (e.kind == ConceptExpr::Kind::kAtom) {
    if (std::find(out->begin(), out->end(), e.name) == out->end()) out->push_back(e.name);
    return;
  }
  for (const auto& c : e.children) Names(c, out);
}

}  // namespace

ConceptExpr ParseConceptRule(std::string_view text) { return Parser(text).Parse(); }

std::string RenderConceptRule(const ConceptExpr& e) {
  if (e.kind == ConceptExpr::Kind::kAtom) {
    const bool bare = std::all_of(e.name.begin(), e.name.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
    return bare ? e.name : "'" + e.name + "'";
  }
  const char* op = e.kind == ConceptExpr::Kind::kAnd ? " AND " : " OR ";
  std::string s;
  for (size_t i = 0; i < e.children.size(); ++i) {
    if (i) s += op;
    const auto& c = e.children[i];
    const bool wrap = c.kind != ConceptExpr::Kind::kAtom && c.kind != e.kind;
    s += wrap ? "[" + RenderConceptRule(c) + "]" : RenderConceptRule(c);
  }
  return s;
}

std::vector<std::string> ConceptNames(const ConceptExpr& expr) {
  std::vector<std::string> out;
  Names(expr, &out);
  return out;
}

bool EvaluateConceptExpr(const ConceptExpr& e,
                         const std::function<bool(const std::string&)>& contains) {
  switch (e.kind) {
    case ConceptExpr::Kind::kAtom: return contains(e.name);
    case ConceptExpr::Kind::kAnd:
      return std::all_of(e.children.begin(), e.children.end(),
                         [&](const ConceptExpr& c) { return EvaluateConceptExpr(c, contains); });
    case ConceptExpr::Kind::kOr:
      return std::any_of(e.children.begin(), e.children.end(),
                         [&](const ConceptExpr& c) { return EvaluateConceptExpr(c, contains); });
  }
  return false;
}

bool DocumentContains(const Concept& c, const DocView& doc, const Preprocessor& pre) {
  for (const auto& m : c.members) {
    bool any = false, all = true;
    for (const auto& t : SplitOn(pre.NormalizeTerm(m), ' ')) {
      if (t.empty()) continue;
      any = true;
      if (!std::binary_search(doc.tokens.begin(), doc.tokens.end(), t)) {
        all = false;
        break;
      }
    }
    if (any && all) return true;
  }
  return false;
}

const Concept* ResolveByName(const ConceptSource& source, std::string_view name) {
  for (SummaryKind k : kAllSummaryKinds) {
    if (const Concept* c = source.Resolve(k, name)) return c;
  }
  return nullptr;
}

std::vector<RankedItem> EvalConceptRule(const ConceptExpr& expr, const Corpus& corpus,
                                        const ConceptResolver& resolve, size_t top_n,
                                        Preference* used) {
  if (top_n == 0) throw InvalidArgument("top_n must be >= 1");
  Preference pref;
  std::map<std::string, size_t> slot;
  for (const auto& name : ConceptNames(expr)) {
    auto c = resolve(name);
    if (!c) throw NotFound("unresolved concept: " + name);
    if (c->members.empty()) throw InvalidArgument("concept has no members: " + name);
    if (!(c->weight > 0.0)) c->weight = 1.0;
    slot[name] = pref.concepts.size();
    pref.concepts.push_back(std::move(*c));
  }
  std::vector<size_t> passers;
  for (size_t d = 0; d < corpus.size(); ++d) {
    const DocView v = corpus.view(d);
    const bool ok = EvaluateConceptExpr(expr, [&](const std::string& name) {
      return DocumentContains(pref.concepts[slot.at(name)], v, corpus.preprocessor());
    });
    if (ok) passers.push_back(d);
  }
  auto ranked = RankSubset(pref, corpus, passers, top_n);
  if (used) *used = std::move(pref);
  return ranked;
}

}  // namespace curator
