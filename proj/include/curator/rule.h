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

#ifndef CURATOR_RULE_H_
#define CURATOR_RULE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curator/concept.h"
#include "curator/corpus.h"

namespace curator {

enum class FeatureFunction {
  kKeyword,
  kTopic,
  kCategory,
  kEntityPerson,
  kEntityOrg,
  kEntityLocation,
  kHashtag,
};

enum class FeatureOperator { kContains, kExact, kInGroup };

const char* FunctionName(FeatureFunction f);
const char* OperatorName(FeatureOperator op);
std::optional<FeatureFunction> ParseFunctionName(std::string_view name);
std::optional<FeatureOperator> ParseOperatorName(std::string_view name);

// keyword/hashtag accept contains|exact; the group functions accept in_group.
bool IsCompatible(FeatureFunction f, FeatureOperator op);

// The concept kind an in_group argument of this function refers to.
SummaryKind GroupKind(FeatureFunction f);

// <Dataset>.<Function>.<Operator>(argument), optionally negated.
struct Feature {
  std::string dataset = "Tweet";
  FeatureFunction function = FeatureFunction::kKeyword;
  FeatureOperator op = FeatureOperator::kContains;
  std::string argument;
  bool negated = false;

  // Throws InvalidArgument on an empty argument or incompatible pair.
  void Validate() const;

  // Stable identity used for sibling de-duplication and ledger keys.
  std::string Key() const;

  friend bool operator==(const Feature&, const Feature&) = default;
};

Feature KeywordFeature(std::string keyword, std::string dataset = "Tweet");
Feature GroupFeature(FeatureFunction function, std::string label,
                     std::string dataset = "Tweet");

struct Tag {
  std::string label;
};

struct RuleNode {
  int id = 0;
  Feature feature;
  std::vector<RuleNode> children;
};

struct Path {
  std::string path_id;
  std::vector<Feature> features;  // root first
  std::vector<int> node_ids;
};

std::string PathIdForLeaf(int leaf_id);

// A tree of features whose root-to-leaf paths are conjunctions; the rule
// matches a document when any path matches. Multiple roots are a union.
class RuleTree {
 public:
  RuleTree() = default;
  RuleTree(std::string rule_id, Tag tag, int children_cap);

  const std::string& rule_id() const { return rule_id_; }
  void set_rule_id(std::string id) { rule_id_ = std::move(id); }
  const Tag& tag() const { return tag_; }
  int children_cap() const { return children_cap_; }
  const std::vector<RuleNode>& roots() const { return roots_; }

  // Adds a feature under `parent_id` (or as a root when nullopt). Returns the
  // new node id. Throws on cap overflow, duplicate sibling, or unknown parent.
  int AddNode(std::optional<int> parent_id, Feature feature);

  // Removes the node and its subtree. Returns the parent id (nullopt for a
  // root). Throws NotFound.
  std::optional<int> RemoveNode(int node_id);

  const RuleNode* FindNode(int node_id) const;
  std::optional<int> ParentOf(int node_id) const;  // nullopt for roots
  // Children of `parent_id` or the root list.
  const std::vector<RuleNode>& SiblingGroup(std::optional<int> parent_id) const;
  // Features on the path from a root down to `node_id`, inclusive.
  std::vector<Feature> Lineage(int node_id) const;

  size_t NodeCount() const;

  // Checks every structural invariant; throws InvalidArgument.
  void Validate() const;

 private:
  std::vector<RuleNode>* ChildrenOf(std::optional<int> parent_id);

  std::string rule_id_;
  Tag tag_;
  std::vector<RuleNode> roots_;
  int children_cap_ = 10;
  int next_id_ = 1;
};

// Depth-first, sibling insertion order; one path per leaf.
std::vector<Path> EnumeratePaths(const RuleTree& rule);

// Evaluates one feature. Throws NotFound when an in_group concept does not
// resolve. `concepts` may be null when the rule has no in_group features.
bool EvaluateFeature(const Feature& feature, const DocView& doc,
                     const Preprocessor& pre, const ConceptSource* concepts);

struct MatchResult {
  std::string doc_id;
  std::vector<std::string> path_ids;
  std::string tag;
};

std::optional<MatchResult> MatchRule(const RuleTree& rule, const DocView& doc,
                                     const Preprocessor& pre,
                                     const ConceptSource* concepts);

struct AnnotationEntry {
  size_t doc = 0;  // corpus index
  std::string doc_id;
  std::vector<std::string> path_ids;
};

struct AnnotationBatch {
  int round = 0;
  std::string rule_id;
  std::vector<AnnotationEntry> entries;  // corpus order
};

// Annotates every matching document. OpenMP-parallel over documents; the
// result is identical to AnnotateCorpusSerial.
AnnotationBatch AnnotateCorpus(const RuleTree& rule, const Corpus& corpus, int round,
                               const ConceptSource* concepts);
AnnotationBatch AnnotateCorpusSerial(const RuleTree& rule, const Corpus& corpus,
                                     int round, const ConceptSource* concepts);

// Bag-of-words any-match baseline.
bool KeymMatch(const std::vector<std::string>& bag, const DocView& doc,
               const Preprocessor& pre);

}  // namespace curator

#endif  // CURATOR_RULE_H_
