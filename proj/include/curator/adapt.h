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

#ifndef CURATOR_ADAPT_H_
#define CURATOR_ADAPT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "curator/bandit.h"
#include "curator/concept.h"
#include "curator/corpus.h"
#include "curator/feedback.h"
#include "curator/knowledge.h"
#include "curator/rule.h"
#include "curator/sampling.h"
#include "json.hpp"

namespace curator {

struct AdaptConfig {
  double precision_threshold = 0.75;
  int children_cap = 10;  // K: restriction count and per-node cap
  double sample_rate = 0.03;
  double epsilon = 0.01;
  int window = 3;
  uint64_t seed = 1;
  size_t min_evidence = 5;  // verified items before a path can be judged
  bool conceptual = true;   // offer hypernym / category concepts as candidates
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double cost_per_verdict = 1.0;

  void Validate() const;
  // Flat key names: precision_threshold, k (or children_cap), sample_rate,
  // epsilon, window, seed, min_evidence, conceptual, alpha0, beta0,
  // cost_per_verdict. Unknown keys throw ConfigError.
  void Set(const std::string& key, const std::string& value);
  // `key = value` lines; '#' starts a comment.
  void LoadFile(const std::string& path);
  nlohmann::json ToJson() const;
};

struct SyntacticCandidate {
  std::string token;    // normalized
  std::string surface;  // keyword argument
  size_t frequency = 0;
  Feature feature() const { return KeywordFeature(surface); }
};

struct ConceptCandidate {
  Concept group;  // kind topic (hypernym) or category
  size_t frequency = 0;
  Feature feature() const;
};

struct CandidateSet {
  int round = 0;
  std::vector<SyntacticCandidate> syntactic;  // sorted by token
  std::vector<ConceptCandidate> conceptual;   // hypernym groups, then categories

  // Per batch entry: indices into syntactic / conceptual present in the item.
  std::vector<std::vector<uint32_t>> item_syntactic;
  std::vector<std::vector<uint32_t>> item_conceptual;

  bool empty() const { return syntactic.empty() && conceptual.empty(); }
};

// Candidates from the items of `batch`: every token not already a keyword of
// the rule, plus (when `conceptual`) mapped hypernym/category groups over
// those tokens. `surfaces` may be null.
CandidateSet ExtractCandidates(const AnnotationBatch& batch, const Corpus& corpus,
                               const KnowledgeBase* kb, const RuleTree& rule, bool conceptual,
                               const std::unordered_map<std::string, std::string>* surfaces =
                                   nullptr);

// Stratum per batch entry: key of its highest-frequency candidate (ties by
// key); "-" when it has none.
std::vector<std::string> StratumLabels(const CandidateSet& candidates);

struct PathCounts {
  size_t relevant = 0;
  size_t irrelevant = 0;
  size_t total() const { return relevant + irrelevant; }
};

std::optional<double> Precision(const PathCounts& c);

// relevant / (relevant + irrelevant) over verified batch items attributed to
// `path_id`; nullopt without verified items.
std::optional<double> PathPrecision(const std::map<std::string, Verdict>& verdicts_by_doc,
                                    const std::string& path_id, const AnnotationBatch& batch);

enum class ActionType { kRestrict, kReplace };
const char* ActionName(ActionType t);

struct PlannedAction {
  ActionType type = ActionType::kRestrict;
  int node_id = 0;
  std::string path_id;  // the imprecise path that triggered it
};

struct AdaptationPlan {
  std::vector<PlannedAction> actions;
};

// Number of batch items annotated through each node.
std::map<int, size_t> NodeAnnotationCounts(const RuleTree& rule, const AnnotationBatch& batch);

// For each imprecise path (precision < threshold): the shallowest non-root
// feature whose annotation count is strictly below the mean of its sibling
// group is replaced, unless it also lies on a precise path; otherwise the
// path's leaf is restricted. Paths without an estimate are skipped.
AdaptationPlan DecideActions(const RuleTree& rule, const std::map<int, size_t>& node_counts,
                             const std::map<std::string, std::optional<double>>& precisions,
                             const AdaptConfig& config);

struct ActionRecord {
  ActionType type = ActionType::kRestrict;
  int node_id = 0;
  std::string path_id;
  std::string feature;                // feature acted on
  std::vector<std::string> added;     // features inserted
  std::vector<int> added_nodes;
  std::string warning;
};

struct AdaptationLog {
  std::vector<ActionRecord> actions;
  std::vector<std::string> paths_before;  // rendered paths
  std::vector<std::string> paths_after;
  std::vector<std::string> warnings;
};

// Applies `plan`: restrict appends the top-K theta candidates as children
// (skipping siblings, ancestors, and `retired`); replace removes the node and
// its subtree and inserts the highest-theta usable candidate at the same
// parent. Replaced features are added to `retired`.
RuleTree AdaptRule(const RuleTree& rule, const AdaptationPlan& plan, const ThetaEstimate& theta,
                   const std::map<std::string, Feature>& arms, const AdaptConfig& config,
                   std::set<std::string>* retired, AdaptationLog* log);

// Sliding means of `window` consecutive values.
std::vector<double> SlidingMeans(const std::vector<double>& history, int window);
// Q_{i+1} + 3 eps >= Q_i for the latest pair; false with < window + 1 values.
bool IsStabilized(const std::vector<double>& history, int window, double epsilon);

class StabilityWindow {
 public:
  StabilityWindow(int window = 3, double epsilon = 0.01) : window_(window), epsilon_(epsilon) {}
  // Appends theta for the path and reports whether it is now stabilized.
  bool Update(const std::string& path_id, double theta);
  const std::vector<double>& History(const std::string& path_id) const;
  void Erase(const std::string& path_id) { history_.erase(path_id); }
  const std::map<std::string, std::vector<double>>& all() const { return history_; }

  friend bool operator==(const StabilityWindow&, const StabilityWindow&) = default;

 private:
  int window_;
  double epsilon_;
  std::map<std::string, std::vector<double>> history_;
};

struct PrfMetrics {
  std::optional<double> precision, recall, f1;
};
PrfMetrics ComputePrf(size_t tp, size_t fp, size_t fn);

struct PathRoundStats {
  std::string path_id;
  std::string rendered;
  size_t annotated = 0;
  PathCounts round;
  PathCounts cumulative;
  std::optional<double> precision;             // this round's verdicts
  std::optional<double> cumulative_precision;  // used for decisions
  double theta = 0.5;                          // posterior mean, cumulative
  bool stabilized = false;
};

struct RoundReport {
  std::string rule_id;
  std::string tag;
  int round = 0;
  uint64_t seed = 0;
  size_t items_annotated = 0;
  size_t population = 0;  // items on at least one non-stabilized path
  size_t sample_size = 0;
  size_t relevant = 0, irrelevant = 0, unknown = 0;
  double cost = 0.0;
  std::optional<double> precision;         // sampled estimate
  std::optional<double> labeled_precision; // against ground truth, if known
  size_t syntactic_candidates = 0;
  size_t conceptual_candidates = 0;
  std::vector<PathRoundStats> paths;
  std::vector<ActionRecord> actions;
  std::vector<std::string> warnings;
  std::vector<std::string> stabilized_paths;
  std::vector<std::string> top_candidates;
  std::string rule_before;
  std::string rule_after;

  nlohmann::json ToJson() const;
};

// A round between sampling and verdict collection.
struct PendingRound {
  int round = 0;
  AnnotationBatch batch;
  CandidateSet candidates;
  SampleSet sample;
  std::vector<LabelTask> tasks;  // one per sampled item, sample order
  std::vector<size_t> task_entries;  // batch entry index per task
};

// Rule state across rounds: tree, cumulative ledger, per-path evidence and
// stability. One round at a time.
class AdaptEngine {
 public:
  AdaptEngine(const Corpus* corpus, const KnowledgeBase* kb, RuleTree seed_rule,
              AdaptConfig config);

  // Ground truth used only to fill labeled_precision in reports.
  void set_labels(const LabelSet* labels) { labels_ = labels; }

  PendingRound PrepareRound() const;
  // Applies verdicts (one per task) and adapts. All-or-nothing: on any error
  // the engine state is unchanged.
  RoundReport CompleteRound(const PendingRound& pending, const std::vector<Verdict>& verdicts);
  // Prepare, collect from `source`, complete.
  RoundReport RunRound(FeedbackSource& source);

  const RuleTree& rule() const { return rule_; }
  const FeedbackLedger& ledger() const { return ledger_; }
  const StabilityWindow& windows() const { return windows_; }
  const std::set<std::string>& stabilized() const { return stabilized_; }
  const std::vector<RoundReport>& reports() const { return reports_; }
  const AdaptConfig& config() const { return config_; }
  const ConceptSource* concepts() const { return &registry_; }
  int next_round() const { return round_ + 1; }

  // Annotation of the whole corpus by the current rule.
  AnnotationBatch Annotate(int round) const;

  // Serializable state for inspection / atomicity checks.
  nlohmann::json StateJson() const;

 private:
  const Corpus* corpus_;
  const KnowledgeBase* kb_;
  const LabelSet* labels_ = nullptr;
  AdaptConfig config_;
  RuleTree rule_;
  FeedbackLedger ledger_;
  StabilityWindow windows_;
  std::map<std::string, PathCounts> path_counts_;
  std::set<std::string> stabilized_;
  std::set<std::string> retired_;
  ConceptRegistry registry_;
  std::vector<RoundReport> reports_;
  std::unordered_map<std::string, std::string> surfaces_;
  int round_ = 0;
};

// Precision of a rule against ground truth over the whole corpus (labeled
// items only).
struct RuleEvaluation {
  size_t annotated = 0;
  size_t labeled = 0;
  size_t relevant = 0;
  std::optional<double> precision;
};
RuleEvaluation EvaluateRule(const RuleTree& rule, const Corpus& corpus, const LabelSet& labels,
                            const ConceptSource* concepts);

}  // namespace curator

#endif  // CURATOR_ADAPT_H_
