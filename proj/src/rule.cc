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

#include "curator/rule.h"

#include <algorithm>
#include <functional>
#include <set>

#include "curator/error.h"

namespace curator {

const char* FunctionName(FeatureFunction f) {
  switch (f) {
    case FeatureFunction::kKeyword: return "keyword";
    case FeatureFunction::kTopic: return "topic";
    case FeatureFunction::kCategory: return "category";
    case FeatureFunction::kEntityPerson: return "entity_person";
    case FeatureFunction::kEntityOrg: return "entity_org";
    case FeatureFunction::kEntityLocation: return "entity_location";
    case FeatureFunction::kHashtag: return "hashtag";
  }
  return "?";
}

const char* OperatorName(FeatureOperator op) {
  switch (op) {
    case FeatureOperator::kContains: return "contains";
    case FeatureOperator::kExact: return "exact";
    case FeatureOperator::kInGroup: return "in_group";
  }
  return "?";
}

std::optional<FeatureFunction> ParseFunctionName(std::string_view name) {
  const std::string n = ToLower(name);
  for (auto f : {FeatureFunction::kKeyword, FeatureFunction::kTopic,
                 FeatureFunction::kCategory, FeatureFunction::kEntityPerson,
                 FeatureFunction::kEntityOrg, FeatureFunction::kEntityLocation,
                 FeatureFunction::kHashtag}) {
    if (n == FunctionName(f)) return f;
  }
  return std::nullopt;
}

std::optional<FeatureOperator> ParseOperatorName(std::string_view name) {
  const std::string n = ToLower(name);
  if (n == "contains") return FeatureOperator::kContains;
  if (n == "exact") return FeatureOperator::kExact;
  if (n == "in_group" || n == "ingroup") return FeatureOperator::kInGroup;
  return std::nullopt;
}

bool IsCompatible(FeatureFunction f, FeatureOperator op) {
  switch (f) {
    case FeatureFunction::kKeyword:
    case FeatureFunction::kHashtag:
      return op == FeatureOperator::kContains || op == FeatureOperator::kExact;
    default:
      return op == FeatureOperator::kInGroup;
  }
}

SummaryKind GroupKind(FeatureFunction f) {
  switch (f) {
    case FeatureFunction::kTopic: return SummaryKind::kTopic;
    case FeatureFunction::kCategory: return SummaryKind::kCategory;
    case FeatureFunction::kEntityPerson: return SummaryKind::kPerson;
    case FeatureFunction::kEntityOrg: return SummaryKind::kOrganization;
    case FeatureFunction::kEntityLocation: return SummaryKind::kLocation;
    default: return SummaryKind::kKeyword;
  }
}

void Feature::Validate() const {
  if (Trim(argument).empty()) throw InvalidArgument("feature argument is empty");
  if (dataset.empty()) throw InvalidArgument("feature dataset is empty");
  if (!IsCompatible(function, op)) {
    throw InvalidArgument(std::string("operator ") + OperatorName(op) +
                          " is not valid for function " + FunctionName(function));
  }
}

std::string Feature::Key() const {
  std::string k = dataset + "." + FunctionName(function) + "." + OperatorName(op) +
                  "(" + argument + ")";
  return negated ? "!" + k : k;
}

Feature KeywordFeature(std::string keyword, std::string dataset) {
  Feature f;
  f.dataset = std::move(dataset);
  f.function = FeatureFunction::kKeyword;
  f.op = FeatureOperator::kContains;
  f.argument = std::move(keyword);
  return f;
}

Feature GroupFeature(FeatureFunction function, std::string label, std::string dataset) {
  Feature f;
  f.dataset = std::move(dataset);
  f.function = function;
  f.op = FeatureOperator::kInGroup;
  f.argument = std::move(label);
  return f;
}

std::string PathIdForLeaf(int leaf_id) { return "p" + std::to_string(leaf_id); }

// -- RuleTree ----------------------------------------------------------------

RuleTree::RuleTree(std::string rule_id, Tag tag, int children_cap)
    : rule_id_(std::move(rule_id)), tag_(std::move(tag)), children_cap_(children_cap) {
  if (Trim(tag_.label).empty()) throw InvalidArgument("rule tag is empty");
  if (children_cap_ < 1) throw InvalidArgument("children cap must be positive");
}

namespace {

RuleNode* FindIn(std::vector<RuleNode>& nodes, int id) {
  for (auto& n : nodes) {
    if (n.id == id) return &n;
    if (RuleNode* r = FindIn(n.children, id)) return r;
  }
  return nullptr;
}

const RuleNode* FindIn(const std::vector<RuleNode>& nodes, int id) {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
    if (const RuleNode* r = FindIn(n.children, id)) return r;
  }
  return nullptr;
}

// Walks down to `id`, accumulating the lineage. Returns false if absent.
bool LineageOf(const std::vector<RuleNode>& nodes, int id, std::vector<const RuleNode*>* out) {
  for (const auto& n : nodes) {
    out->push_back(&n);
    if (n.id == id || LineageOf(n.children, id, out)) return true;
    out->pop_back();
  }
  return false;
}

size_t CountNodes(const std::vector<RuleNode>& nodes) {
  size_t c = 0;
  for (const auto& n : nodes) c += 1 + CountNodes(n.children);
  return c;
}

}  // namespace

std::vector<RuleNode>* RuleTree::ChildrenOf(std::optional<int> parent_id) {
  if (!parent_id) return &roots_;
  RuleNode* p = FindIn(roots_, *parent_id);
  if (!p) throw NotFound("rule " + rule_id_ + " has no node " + std::to_string(*parent_id));
  return &p->children;
}

int RuleTree::AddNode(std::optional<int> parent_id, Feature feature) {
  feature.Validate();
  std::vector<RuleNode>* siblings = ChildrenOf(parent_id);
  if (static_cast<int>(siblings->size()) >= children_cap_) {
    throw InvalidArgument("children cap " + std::to_string(children_cap_) + " exceeded");
  }
  for (const auto& s : *siblings) {
    if (s.feature == feature) {
      throw InvalidArgument("duplicate sibling feature " + feature.Key());
    }
  }
  RuleNode node;
  node.id = next_id_++;
  node.feature = std::move(feature);
  siblings->push_back(std::move(node));
  return siblings->back().id;
}

std::optional<int> RuleTree::RemoveNode(int node_id) {
  const std::optional<int> parent = ParentOf(node_id);
  std::vector<RuleNode>* siblings = ChildrenOf(parent);
  auto it = std::find_if(siblings->begin(), siblings->end(),
                         [&](const RuleNode& n) { return n.id == node_id; });
  if (it == siblings->end()) throw NotFound("no node " + std::to_string(node_id));
  siblings->erase(it);
  return parent;
}

const RuleNode* RuleTree::FindNode(int node_id) const { return FindIn(roots_, node_id); }

std::optional<int> RuleTree::ParentOf(int node_id) const {
  std::vector<const RuleNode*> lineage;
  if (!LineageOf(roots_, node_id, &lineage)) {
    throw NotFound("rule " + rule_id_ + " has no node " + std::to_string(node_id));
  }
  if (lineage.size() < 2) return std::nullopt;
  return lineage[lineage.size() - 2]->id;
}

const std::vector<RuleNode>& RuleTree::SiblingGroup(std::optional<int> parent_id) const {
  return *const_cast<RuleTree*>(this)->ChildrenOf(parent_id);
}

std::vector<Feature> RuleTree::Lineage(int node_id) const {
  std::vector<const RuleNode*> lineage;
  if (!LineageOf(roots_, node_id, &lineage)) {
    throw NotFound("rule " + rule_id_ + " has no node " + std::to_string(node_id));
  }
  std::vector<Feature> out;
  for (const RuleNode* n : lineage) out.push_back(n->feature);
  return out;
}

size_t RuleTree::NodeCount() const { return CountNodes(roots_); }

void RuleTree::Validate() const {
  if (Trim(tag_.label).empty()) throw InvalidArgument("rule tag is empty");
  if (roots_.empty()) throw InvalidArgument("rule has no features");
  std::function<void(const std::vector<RuleNode>&, bool)> walk =
      [&](const std::vector<RuleNode>& group, bool positive_above) {
        if (static_cast<int>(group.size()) > children_cap_) {
          throw InvalidArgument("node has more than " + std::to_string(children_cap_) +
                                " children");
        }
        std::set<std::string> keys;
        for (const auto& n : group) {
          n.feature.Validate();
          if (!keys.insert(n.feature.Key()).second) {
            throw InvalidArgument("duplicate sibling feature " + n.feature.Key());
          }
          const bool positive = positive_above || !n.feature.negated;
          if (n.children.empty() && !positive) {
            throw InvalidArgument("path ending at node " + std::to_string(n.id) +
                                  " has no positive feature");
          }
          walk(n.children, positive);
        }
      };
  walk(roots_, false);
}

std::vector<Path> EnumeratePaths(const RuleTree& rule) {
  std::vector<Path> paths;
  Path current;
  std::function<void(const std::vector<RuleNode>&)> walk =
      [&](const std::vector<RuleNode>& group) {
        for (const auto& n : group) {
          current.features.push_back(n.feature);
          current.node_ids.push_back(n.id);
          if (n.children.empty()) {
            Path p = current;
            p.path_id = PathIdForLeaf(n.id);
            paths.push_back(std::move(p));
          } else {
            walk(n.children);
          }
          current.features.pop_back();
          current.node_ids.pop_back();
        }
      };
  walk(rule.roots());
  return paths;
}

// -- Evaluation --------------------------------------------------------------

namespace {

bool Has(std::span<const std::string> sorted, const std::string& v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

std::vector<std::string> SplitSpaces(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : SplitOn(s, ' ')) {
    if (!part.empty()) out.push_back(std::move(part));
  }
  return out;
}

// A feature with its argument pre-normalized for repeated evaluation.
class CompiledFeature {
 public:
  CompiledFeature(const Feature& f, const Preprocessor& pre, const ConceptSource* concepts)
      : function_(f.function), op_(f.op), negated_(f.negated) {
    switch (f.function) {
      case FeatureFunction::kKeyword:
        if (f.op == FeatureOperator::kContains) {
          alternatives_.push_back(SplitSpaces(pre.NormalizeTerm(f.argument)));
        } else {
          alternatives_.push_back(WordSequence(f.argument));
        }
        break;
      case FeatureFunction::kHashtag: {
        std::string tag = ToLower(Trim(f.argument));
        if (!tag.empty() && tag[0] == '#') tag.erase(0, 1);
        alternatives_.push_back({tag});
        break;
      }
      default: {
        const Concept* c =
            concepts ? concepts->Resolve(GroupKind(f.function), f.argument) : nullptr;
        if (!c) {
          throw NotFound("unresolved concept `" + f.argument + "` for " +
                         FunctionName(f.function) + ".in_group");
        }
        const bool entity = f.function == FeatureFunction::kEntityPerson ||
                            f.function == FeatureFunction::kEntityOrg ||
                            f.function == FeatureFunction::kEntityLocation;
        for (const auto& m : c->members) {
          if (entity) {
            alternatives_.push_back({ToLower(Trim(m))});
          } else {
            alternatives_.push_back(SplitSpaces(pre.NormalizeTerm(m)));
          }
        }
      }
    }
    // Arguments that normalize to nothing (stopwords) never match.
    std::erase_if(alternatives_, [](const auto& a) { return a.empty() || a[0].empty(); });
  }

  bool Evaluate(const DocView& doc) const { return Base(doc) != negated_; }

 private:
  bool Base(const DocView& doc) const {
    switch (function_) {
      case FeatureFunction::kKeyword: {
        const auto haystack = op_ == FeatureOperator::kContains ? doc.tokens : doc.surfaces;
        return AnyAlternative([&](const std::string& t) { return Has(haystack, t); });
      }
      case FeatureFunction::kHashtag:
        if (op_ == FeatureOperator::kExact) {
          return AnyAlternative([&](const std::string& t) { return Has(doc.hashtags, t); });
        }
        // contains: the argument occurs inside a hashtag (#mentalhealth).
        return AnyAlternative([&](const std::string& t) {
          return std::any_of(doc.hashtags.begin(), doc.hashtags.end(),
                             [&](const std::string& h) { return h.find(t) != std::string::npos; });
        });
      case FeatureFunction::kEntityPerson:
        return AnyEntity(doc.entities[static_cast<int>(EntityKind::kPerson)]);
      case FeatureFunction::kEntityOrg:
        return AnyEntity(doc.entities[static_cast<int>(EntityKind::kOrganization)]);
      case FeatureFunction::kEntityLocation:
        return AnyEntity(doc.entities[static_cast<int>(EntityKind::kLocation)]);
      default:
        return AnyAlternative([&](const std::string& t) { return Has(doc.tokens, t); });
    }
  }

  // True when every term of at least one alternative satisfies `present`.
  template <typename Pred>
  bool AnyAlternative(Pred present) const {
    for (const auto& alt : alternatives_) {
      if (std::all_of(alt.begin(), alt.end(), present)) return true;
    }
    return false;
  }

  bool AnyEntity(std::span<const std::string> mentions) const {
    return AnyAlternative([&](const std::string& t) { return Has(mentions, t); });
  }

  FeatureFunction function_;
  FeatureOperator op_;
  bool negated_;
  std::vector<std::vector<std::string>> alternatives_;
};

struct CompiledNode {
  CompiledFeature feature;
  std::vector<CompiledNode> children;
  std::string path_id;  // set for leaves
};

std::vector<CompiledNode> Compile(const std::vector<RuleNode>& nodes, const Preprocessor& pre,
                                  const ConceptSource* concepts) {
  std::vector<CompiledNode> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) {
    CompiledNode c{CompiledFeature(n.feature, pre, concepts), {}, {}};
    if (n.children.empty()) {
      c.path_id = PathIdForLeaf(n.id);
    } else {
      c.children = Compile(n.children, pre, concepts);
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Depth-first with pruning: a false feature cuts its whole subtree.
void MatchCompiled(const std::vector<CompiledNode>& nodes, const DocView& doc,
                   std::vector<std::string>* matched) {
  for (const auto& n : nodes) {
    if (!n.feature.Evaluate(doc)) continue;
    if (n.children.empty()) {
      matched->push_back(n.path_id);
    } else {
      MatchCompiled(n.children, doc, matched);
    }
  }
}

}  // namespace

bool EvaluateFeature(const Feature& feature, const DocView& doc, const Preprocessor& pre,
                     const ConceptSource* concepts) {
  return CompiledFeature(feature, pre, concepts).Evaluate(doc);
}

std::optional<MatchResult> MatchRule(const RuleTree& rule, const DocView& doc,
                                     const Preprocessor& pre, const ConceptSource* concepts) {
  const auto compiled = Compile(rule.roots(), pre, concepts);
  MatchResult r;
  MatchCompiled(compiled, doc, &r.path_ids);
  if (r.path_ids.empty()) return std::nullopt;
  r.doc_id = std::string(doc.doc_id);
  r.tag = rule.tag().label;
  return r;
}

AnnotationBatch AnnotateCorpusSerial(const RuleTree& rule, const Corpus& corpus, int round,
                                     const ConceptSource* concepts) {
  const auto compiled = Compile(rule.roots(), corpus.preprocessor(), concepts);
  AnnotationBatch batch;
  batch.round = round;
  batch.rule_id = rule.rule_id();
  for (size_t i = 0; i < corpus.size(); ++i) {
    std::vector<std::string> matched;
    MatchCompiled(compiled, corpus.view(i), &matched);
    if (!matched.empty()) {
      batch.entries.push_back({i, corpus.doc(i).doc_id, std::move(matched)});
    }
  }
  return batch;
}

AnnotationBatch AnnotateCorpus(const RuleTree& rule, const Corpus& corpus, int round,
                               const ConceptSource* concepts) {
  const auto compiled = Compile(rule.roots(), corpus.preprocessor(), concepts);
  const long n = static_cast<long>(corpus.size());
  std::vector<std::vector<std::string>> matched(corpus.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (long i = 0; i < n; ++i) {
    MatchCompiled(compiled, corpus.view(static_cast<size_t>(i)), &matched[i]);
  }
  AnnotationBatch batch;
  batch.round = round;
  batch.rule_id = rule.rule_id();
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (!matched[i].empty()) {
      batch.entries.push_back({i, corpus.doc(i).doc_id, std::move(matched[i])});
    }
  }
  return batch;
}

bool KeymMatch(const std::vector<std::string>& bag, const DocView& doc,
               const Preprocessor& pre) {
  if (bag.empty()) throw InvalidArgument("KEYM bag of words is empty");
  for (const auto& term : bag) {
    const auto parts = SplitSpaces(pre.NormalizeTerm(term));
    if (!parts.empty() &&
        std::all_of(parts.begin(), parts.end(),
                    [&](const std::string& t) { return Has(doc.tokens, t); })) {
      return true;
    }
  }
  return false;
}

}  // namespace curator
