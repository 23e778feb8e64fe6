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

#include "curator/adapt.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "curator/error.h"
#include "curator/rule_lang.h"
#include "curator/summarize.h"
#include "curator/text.h"

namespace curator {

using nlohmann::json;

// ---- config ----------------------------------------------------------------

void AdaptConfig::Validate() const {
  if (!(precision_threshold > 0.0 && precision_threshold < 1.0)) {
    throw ConfigError("precision_threshold must be in (0, 1)");
  }
  if (children_cap < 1) throw ConfigError("k must be >= 1");
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) throw ConfigError("sample_rate must be in (0, 1]");
  if (window < 2) throw ConfigError("window must be >= 2");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(alpha0 > 0.0) || !(beta0 > 0.0)) throw ConfigError("alpha0 and beta0 must be > 0");
  if (cost_per_verdict < 0.0) throw ConfigError("cost_per_verdict must be >= 0");
}

namespace {

double ParseDouble(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config " + key + ": not a number: " + v);
  }
}

long long ParseInt(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config " + key + ": not an integer: " + v);
  }
}

bool ParseBool(const std::string& key, const std::string& v) {
  const std::string l = ToLower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw ConfigError("config " + key + ": not a boolean: " + v);
}

}  // namespace

void AdaptConfig::Set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = ToLower(Trim(raw_key));
  const std::string value = Trim(raw_value);
  if (key == "precision_threshold" || key == "threshold") {
    precision_threshold = ParseDouble(key, value);
  } else if (key == "k" || key == "children_cap") {
    children_cap = static_cast<int>(ParseInt(key, value));
  } else if (key == "sample_rate" || key == "rate") {
    sample_rate = ParseDouble(key, value);
  } else if (key == "epsilon") {
    epsilon = ParseDouble(key, value);
  } else if (key == "window") {
    window = static_cast<int>(ParseInt(key, value));
  } else if (key == "seed") {
    seed = static_cast<uint64_t>(ParseInt(key, value));
  } else if (key == "min_evidence") {
    min_evidence = static_cast<size_t>(ParseInt(key, value));
  } else if (key == "conceptual") {
    conceptual = ParseBool(key, value);
  } else if (key == "alpha0") {
    alpha0 = ParseDouble(key, value);
  } else if (key == "beta0") {
    beta0 = ParseDouble(key, value);
  } else if (key == "cost_per_verdict") {
    cost_per_verdict = ParseDouble(key, value);
  } else {
    throw ConfigError("unknown config key: " + raw_key);
  }
}

void AdaptConfig::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (Trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
    }
    Set(line.substr(0, eq), line.substr(eq + 1));
  }
}

json AdaptConfig::ToJson() const {
  return {{"precision_threshold", precision_threshold},
          {"k", children_cap},
          {"sample_rate", sample_rate},
          {"epsilon", epsilon},
          {"window", window},
          {"seed", seed},
          {"min_evidence", min_evidence},
          {"conceptual", conceptual},
          {"alpha0", alpha0},
          {"beta0", beta0},
          {"cost_per_verdict", cost_per_verdict}};
}

// ---- candidates ------------------------------------------------------------

Feature ConceptCandidate::feature() const {
  return GroupFeature(group.kind == SummaryKind::kCategory ? FeatureFunction::kCategory
                                                           : FeatureFunction::kTopic,
                      group.label);
}

namespace {

void CollectRuleKeywords(const std::vector<RuleNode>& nodes, const Preprocessor& pre,
                         std::unordered_set<std::string>* tokens, std::set<std::string>* keys) {
  for (const auto& n : nodes) {
    keys->insert(n.feature.Key());
    if (n.feature.function == FeatureFunction::kKeyword) {
      const std::string t = pre.NormalizeTerm(n.feature.argument);
      if (!t.empty()) tokens->insert(t);
    }
    CollectRuleKeywords(n.children, pre, tokens, keys);
  }
}

}  // namespace

CandidateSet ExtractCandidates(const AnnotationBatch& batch, const Corpus& corpus,
                               const KnowledgeBase* kb, const RuleTree& rule, bool conceptual,
                               const std::unordered_map<std::string, std::string>* surfaces) {
  CandidateSet out;
  out.round = batch.round;
  std::unordered_set<std::string> excluded;
  std::set<std::string> rule_keys;
  CollectRuleKeywords(rule.roots(), corpus.preprocessor(), &excluded, &rule_keys);

  std::unordered_map<std::string, std::string> local_surfaces;
  if (!surfaces) {
    local_surfaces = TokenSurfaceForms(corpus);
    surfaces = &local_surfaces;
  }

  std::map<std::string, size_t> freq;
  for (const auto& e : batch.entries) {
    for (const auto& t : corpus.view(e.doc).tokens) {
      if (!excluded.count(t)) ++freq[t];
    }
  }
  std::unordered_map<std::string, uint32_t> index;
  for (const auto& [token, f] : freq) {
    auto it = surfaces->find(token);
    const std::string surface = it == surfaces->end() ? token : it->second;
    if (rule_keys.count(KeywordFeature(surface).Key())) continue;
    index[token] = static_cast<uint32_t>(out.syntactic.size());
    out.syntactic.push_back({token, surface, f});
  }

  // token index -> concept indices
  std::vector<std::vector<uint32_t>> token_concepts(out.syntactic.size());
  if (conceptual && kb) {
    std::vector<std::string> attrs;
    attrs.reserve(out.syntactic.size());
    for (const auto& c : out.syntactic) attrs.push_back(c.surface);
    for (SummaryKind kind : {SummaryKind::kTopic, SummaryKind::kCategory}) {
      if (!kb->HasSourceFor(kind)) continue;
      const auto groups = SummarizeFeatures(attrs, [&](const std::string& a) {
        auto ann = kb->AnnotateAttribute(a, kind);
        return ann ? std::optional<std::string>(ann->descriptor) : std::nullopt;
      });
      for (const auto& g : groups) {
        if (!g.mapped) continue;
        ConceptCandidate cc{Concept{g.descriptor, kind, g.members, 0.0}, 0};
        if (rule_keys.count(cc.feature().Key())) continue;
        const auto ci = static_cast<uint32_t>(out.conceptual.size());
        for (const auto& m : g.members) {
          const auto it = index.find(corpus.preprocessor().NormalizeTerm(m));
          if (it != index.end()) token_concepts[it->second].push_back(ci);
        }
        out.conceptual.push_back(std::move(cc));
      }
    }
  }

  out.item_syntactic.resize(batch.entries.size());
  out.item_conceptual.resize(batch.entries.size());
  for (size_t i = 0; i < batch.entries.size(); ++i) {
    auto& syn = out.item_syntactic[i];
    for (const auto& t : corpus.view(batch.entries[i].doc).tokens) {
      if (auto it = index.find(t); it != index.end()) syn.push_back(it->second);
    }
    std::sort(syn.begin(), syn.end());
    auto& con = out.item_conceptual[i];
    for (uint32_t s : syn) {
      for (uint32_t c : token_concepts[s]) con.push_back(c);
    }
    std::sort(con.begin(), con.end());
    con.erase(std::unique(con.begin(), con.end()), con.end());
    for (uint32_t c : con) ++out.conceptual[c].frequency;
  }
  // Concepts are built from batch tokens, so each has frequency >= 1.
  return out;
}

std::vector<std::string> StratumLabels(const CandidateSet& candidates) {
  std::vector<std::string> out(candidates.item_syntactic.size(), "-");
  for (size_t i = 0; i < out.size(); ++i) {
    size_t best = 0;
    std::string best_key;
    const auto consider = [&](size_t f, std::string key) {
      if (f > best || (f == best && key < best_key)) {
        best = f;
        best_key = std::move(key);
      }
    };
    for (uint32_t s : candidates.item_syntactic[i]) {
      consider(candidates.syntactic[s].frequency, candidates.syntactic[s].feature().Key());
    }
    for (uint32_t c : candidates.item_conceptual[i]) {
      consider(candidates.conceptual[c].frequency, candidates.conceptual[c].feature().Key());
    }
    if (best > 0) out[i] = best_key;
  }
  return out;
}

// ---- precision and planning -------------------------------------------------

std::optional<double> Precision(const PathCounts& c) {
  if (c.total() == 0) return std::nullopt;
  return static_cast<double>(c.relevant) / static_cast<double>(c.total());
}

std::optional<double> PathPrecision(const std::map<std::string, Verdict>& verdicts_by_doc,
                                    const std::string& path_id, const AnnotationBatch& batch) {
  PathCounts c;
  for (const auto& e : batch.entries) {
    if (std::find(e.path_ids.begin(), e.path_ids.end(), path_id) == e.path_ids.end()) continue;
    auto it = verdicts_by_doc.find(e.doc_id);
    if (it == verdicts_by_doc.end()) continue;
    if (it->second == Verdict::kRelevant) ++c.relevant;
    if (it->second == Verdict::kIrrelevant) ++c.irrelevant;
  }
  return Precision(c);
}

const char* ActionName(ActionType t) {
  return t == ActionType::kRestrict ? "restrict" : "replace";
}

std::map<int, size_t> NodeAnnotationCounts(const RuleTree& rule, const AnnotationBatch& batch) {
  std::map<std::string, std::vector<int>> path_nodes;
  std::map<int, size_t> counts;
  for (const auto& p : EnumeratePaths(rule)) {
    path_nodes[p.path_id] = p.node_ids;
    for (int id : p.node_ids) counts[id];
  }
  std::vector<int> nodes;
  for (const auto& e : batch.entries) {
    nodes.clear();
    for (const auto& pid : e.path_ids) {
      auto it = path_nodes.find(pid);
      if (it != path_nodes.end()) nodes.insert(nodes.end(), it->second.begin(), it->second.end());
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (int id : nodes) ++counts[id];
  }
  return counts;
}

AdaptationPlan DecideActions(const RuleTree& rule, const std::map<int, size_t>& node_counts,
                             const std::map<std::string, std::optional<double>>& precisions,
                             const AdaptConfig& config) {
  const auto paths = EnumeratePaths(rule);
  const auto precision_of = [&](const std::string& pid) -> std::optional<double> {
    auto it = precisions.find(pid);
    return it == precisions.end() ? std::nullopt : it->second;
  };
  std::set<int> on_precise;
  for (const auto& p : paths) {
    const auto pr = precision_of(p.path_id);
    if (pr && *pr >= config.precision_threshold) on_precise.insert(p.node_ids.begin(), p.node_ids.end());
  }
  const auto count_of = [&](int id) {
    auto it = node_counts.find(id);
    return it == node_counts.end() ? size_t{0} : it->second;
  };

  AdaptationPlan plan;
  std::set<int> targeted;
  for (const auto& p : paths) {
    const auto pr = precision_of(p.path_id);
    if (!pr || *pr >= config.precision_threshold) continue;
    std::optional<int> replace;
    for (size_t depth = 1; depth < p.node_ids.size() && !replace; ++depth) {
      const int id = p.node_ids[depth];
      if (on_precise.count(id)) continue;
      const auto& group = rule.SiblingGroup(rule.ParentOf(id));
      double sum = 0.0;
      for (const auto& s : group) sum += static_cast<double>(count_of(s.id));
      const double mean = sum / static_cast<double>(group.size());
      if (static_cast<double>(count_of(id)) < mean) replace = id;
    }
    PlannedAction a;
    a.path_id = p.path_id;
    if (replace) {
      a.type = ActionType::kReplace;
      a.node_id = *replace;
    } else {
      a.type = ActionType::kRestrict;
      a.node_id = p.node_ids.back();
    }
    if (targeted.insert(a.node_id).second) plan.actions.push_back(a);
  }
  // Drop actions inside subtrees that are being replaced.
  std::set<int> doomed;
  for (const auto& a : plan.actions) {
    if (a.type != ActionType::kReplace) continue;
    std::vector<const RuleNode*> stack{rule.FindNode(a.node_id)};
    while (!stack.empty()) {
      const RuleNode* n = stack.back();
      stack.pop_back();
      for (const auto& c : n->children) {
        doomed.insert(c.id);
        stack.push_back(&c);
      }
    }
  }
  std::erase_if(plan.actions, [&](const PlannedAction& a) { return doomed.count(a.node_id) > 0; });
  return plan;
}

namespace {

std::string RenderPath(const Path& p) {
  std::string s = "[";
  for (size_t i = 0; i < p.features.size(); ++i) {
    if (i) s += " AND ";
    s += RenderFeature(p.features[i]);
  }
  return s + "]";
}

std::vector<std::string> RenderPaths(const RuleTree& rule) {
  std::vector<std::string> out;
  for (const auto& p : EnumeratePaths(rule)) out.push_back(p.path_id + " " + RenderPath(p));
  return out;
}

bool Usable(const std::string& key, const std::vector<Feature>& lineage,
            const std::vector<RuleNode>& siblings, const std::set<std::string>& retired) {
  if (retired.count(key)) return false;
  for (const auto& f : lineage) {
    if (f.Key() == key) return false;
  }
  for (const auto& s : siblings) {
    if (s.feature.Key() == key) return false;
  }
  return true;
}

}  // namespace

RuleTree AdaptRule(const RuleTree& rule, const AdaptationPlan& plan, const ThetaEstimate& theta,
                   const std::map<std::string, Feature>& arms, const AdaptConfig& config,
                   std::set<std::string>* retired, AdaptationLog* log) {
  RuleTree out = rule;
  AdaptationLog local;
  AdaptationLog& lg = log ? *log : local;
  std::set<std::string> local_retired;
  std::set<std::string>& ret = retired ? *retired : local_retired;
  lg.paths_before = RenderPaths(rule);

  const auto ranked = theta.theta.empty() ? std::vector<std::string>{}
                                          : TopK(theta, theta.theta.size());

  // Restrictions first so replacement ids stay valid either way.
  std::vector<PlannedAction> ordered = plan.actions;
  std::stable_sort(ordered.begin(), ordered.end(), [](const PlannedAction& a, const PlannedAction& b) {
    return a.type == ActionType::kRestrict && b.type == ActionType::kReplace;
  });

  for (const auto& a : ordered) {
    const RuleNode* node = out.FindNode(a.node_id);
    if (!node) {
      lg.warnings.push_back("action on missing node " + std::to_string(a.node_id));
      continue;
    }
    ActionRecord rec;
    rec.type = a.type;
    rec.node_id = a.node_id;
    rec.path_id = a.path_id;
    rec.feature = RenderFeature(node->feature);

    if (a.type == ActionType::kRestrict) {
      const auto lineage = out.Lineage(a.node_id);
      size_t added = 0;
      for (const auto& key : ranked) {
        if (added >= static_cast<size_t>(config.children_cap)) break;
        const RuleNode* n = out.FindNode(a.node_id);
        if (n->children.size() >= static_cast<size_t>(config.children_cap)) break;
        if (!Usable(key, lineage, n->children, ret)) continue;
        auto arm = arms.find(key);
        if (arm == arms.end()) continue;
        const int id = out.AddNode(a.node_id, arm->second);
        rec.added.push_back(RenderFeature(arm->second));
        rec.added_nodes.push_back(id);
        ++added;
      }
      if (added == 0) rec.warning = "no candidates available to restrict";
    } else {
      const std::optional<int> parent = out.ParentOf(a.node_id);
      const std::string removed_key = node->feature.Key();
      ret.insert(removed_key);
      std::vector<Feature> lineage;
      if (parent) lineage = out.Lineage(*parent);
      std::optional<std::string> pick;
      {
        const auto& siblings = out.SiblingGroup(parent);
        for (const auto& key : ranked) {
          if (arms.count(key) && Usable(key, lineage, siblings, ret)) {
            pick = key;
            break;
          }
        }
      }
      if (!pick) {
        rec.warning = "no candidate available for replacement; action skipped";
        ret.erase(removed_key);
      } else {
        out.RemoveNode(a.node_id);
        const Feature& f = arms.at(*pick);
        const int id = out.AddNode(parent, f);
        rec.added.push_back(RenderFeature(f));
        rec.added_nodes.push_back(id);
      }
    }
    if (!rec.warning.empty()) lg.warnings.push_back(rec.warning);
    lg.actions.push_back(std::move(rec));
  }
  out.Validate();
  lg.paths_after = RenderPaths(out);
  return out;
}

// ---- stability --------------------------------------------------------------

std::vector<double> SlidingMeans(const std::vector<double>& history, int window) {
  std::vector<double> out;
  if (window < 1 || history.size() < static_cast<size_t>(window)) return out;
  for (size_t i = 0; i + window <= history.size(); ++i) {
    double s = 0.0;
    for (int j = 0; j < window; ++j) s += history[i + j];
    out.push_back(s / window);
  }
  return out;
}

bool IsStabilized(const std::vector<double>& history, int window, double epsilon) {
  if (history.size() < static_cast<size_t>(window) + 1) return false;
  const auto q = SlidingMeans(history, window);
  const double qi = q[q.size() - 2], qn = q.back();
  return qn + 3.0 * epsilon >= qi;
}

bool StabilityWindow::Update(const std::string& path_id, double theta) {
  auto& h = history_[path_id];
  h.push_back(theta);
  return IsStabilized(h, window_, epsilon_);
}

const std::vector<double>& StabilityWindow::History(const std::string& path_id) const {
  static const std::vector<double> kEmpty;
  auto it = history_.find(path_id);
  return it == history_.end() ? kEmpty : it->second;
}

PrfMetrics ComputePrf(size_t tp, size_t fp, size_t fn) {
  PrfMetrics m;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

// ---- reports ----------------------------------------------------------------

namespace {

json Opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ActionJson(const ActionRecord& a) {
  json j = {{"type", ActionName(a.type)}, {"node_id", a.node_id}, {"path_id", a.path_id},
            {"feature", a.feature},       {"added", a.added},     {"added_nodes", a.added_nodes}};
  if (!a.warning.empty()) j["warning"] = a.warning;
  return j;
}

}  // namespace

json RoundReport::ToJson() const {
  json paths_j = json::array();
  for (const auto& p : paths) {
    paths_j.push_back({{"path_id", p.path_id},
                       {"rule", p.rendered},
                       {"annotated", p.annotated},
                       {"relevant", p.round.relevant},
                       {"irrelevant", p.round.irrelevant},
                       {"cumulative_relevant", p.cumulative.relevant},
                       {"cumulative_irrelevant", p.cumulative.irrelevant},
                       {"precision", Opt(p.precision)},
                       {"cumulative_precision", Opt(p.cumulative_precision)},
                       {"theta", p.theta},
                       {"stabilized", p.stabilized}});
  }
  json actions_j = json::array();
  for (const auto& a : actions) actions_j.push_back(ActionJson(a));
  return {{"rule_id", rule_id},
          {"tag", tag},
          {"round", round},
          {"seed", seed},
          {"items_annotated", items_annotated},
          {"population", population},
          {"sample_size", sample_size},
          {"verdicts", {{"relevant", relevant}, {"irrelevant", irrelevant}, {"unknown", unknown}}},
          {"cost", cost},
          {"precision", Opt(precision)},
          {"labeled_precision", Opt(labeled_precision)},
          {"candidates", {{"syntactic", syntactic_candidates}, {"conceptual", conceptual_candidates}}},
          {"paths", paths_j},
          {"actions", actions_j},
          {"warnings", warnings},
          {"stabilized_paths", stabilized_paths},
          {"top_candidates", top_candidates},
          {"rule_before", rule_before},
          {"rule_after", rule_after}};
}

// ---- engine -----------------------------------------------------------------

namespace {

uint64_t RoundSeed(uint64_t seed, int round) {
  return seed * 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(round) * 0xbf58476d1ce4e5b9ull;
}

}  // namespace

AdaptEngine::AdaptEngine(const Corpus* corpus, const KnowledgeBase* kb, RuleTree seed_rule,
                         AdaptConfig config)
    : corpus_(corpus),
      kb_(kb),
      config_(config),
      rule_(std::move(seed_rule)),
      ledger_(config.alpha0, config.beta0),
      windows_(config.window, config.epsilon),
      registry_(kb) {
  if (!corpus_) throw InvalidArgument("engine requires a corpus");
  config_.Validate();
  rule_.Validate();
  surfaces_ = TokenSurfaceForms(*corpus_);
}

AnnotationBatch AdaptEngine::Annotate(int round) const {
  return AnnotateCorpus(rule_, *corpus_, round, &registry_);
}

PendingRound AdaptEngine::PrepareRound() const {
  PendingRound p;
  p.round = round_ + 1;
  p.batch = Annotate(p.round);
  if (p.batch.entries.empty()) return p;
  p.candidates =
      ExtractCandidates(p.batch, *corpus_, kb_, rule_, config_.conceptual, &surfaces_);
  const auto strata = StratumLabels(p.candidates);

  std::vector<StratifiedItem> population;
  std::map<std::string, size_t> entry_of;
  for (size_t i = 0; i < p.batch.entries.size(); ++i) {
    const auto& e = p.batch.entries[i];
    const bool open = std::any_of(e.path_ids.begin(), e.path_ids.end(),
                                  [&](const std::string& pid) { return !stabilized_.count(pid); });
    if (!open) continue;
    population.push_back({e.doc_id, strata[i]});
    entry_of[e.doc_id] = i;
  }
  if (population.empty()) return p;
  p.sample = StratifiedSample(population, config_.sample_rate, RoundSeed(config_.seed, p.round),
                              p.round);
  for (const auto& s : p.sample.items) {
    const size_t idx = entry_of.at(s.item_id);
    const size_t doc = p.batch.entries[idx].doc;
    p.tasks.push_back({TaskId(rule_.rule_id(), p.round, s.item_id), s.item_id,
                       corpus_->doc(doc).text, rule_.tag().label, p.round,
                       DefaultInstructions(rule_.tag().label)});
    p.task_entries.push_back(idx);
  }
  return p;
}

RoundReport AdaptEngine::CompleteRound(const PendingRound& pending,
                                       const std::vector<Verdict>& verdicts) {
  if (pending.round != round_ + 1) {
    throw Conflict("round " + std::to_string(pending.round) + " is stale; expected " +
                   std::to_string(round_ + 1));
  }
  if (verdicts.size() != pending.tasks.size()) {
    throw InvalidArgument("expected " + std::to_string(pending.tasks.size()) + " verdicts, got " +
                          std::to_string(verdicts.size()));
  }

  // Work on copies; commit at the end.
  FeedbackLedger ledger = ledger_;
  StabilityWindow windows = windows_;
  auto path_counts = path_counts_;
  auto stabilized = stabilized_;
  auto retired = retired_;
  ConceptRegistry registry = registry_;

  const auto& batch = pending.batch;
  const auto& cands = pending.candidates;
  RoundReport rep;
  rep.rule_id = rule_.rule_id();
  rep.tag = rule_.tag().label;
  rep.round = pending.round;
  rep.seed = config_.seed;
  rep.items_annotated = batch.entries.size();
  rep.sample_size = pending.tasks.size();
  rep.syntactic_candidates = cands.syntactic.size();
  rep.conceptual_candidates = cands.conceptual.size();
  rep.rule_before = Render(rule_);
  for (const auto& e : batch.entries) {
    if (std::any_of(e.path_ids.begin(), e.path_ids.end(),
                    [&](const std::string& pid) { return !stabilized_.count(pid); })) {
      ++rep.population;
    }
  }

  // Ledger update.
  std::vector<ObservedItem> observed;
  std::set<std::string> sampled;
  std::map<std::string, PathCounts> round_counts;
  for (size_t t = 0; t < pending.tasks.size(); ++t) {
    const size_t idx = pending.task_entries.at(t);
    const auto& entry = batch.entries.at(idx);
    sampled.insert(entry.doc_id);
    ObservedItem item{entry.doc_id, verdicts[t], {}};
    for (uint32_t s : cands.item_syntactic.at(idx)) {
      item.features.push_back(cands.syntactic[s].feature().Key());
    }
    observed.push_back(std::move(item));
    switch (verdicts[t]) {
      case Verdict::kRelevant: ++rep.relevant; break;
      case Verdict::kIrrelevant: ++rep.irrelevant; break;
      case Verdict::kUnknown: ++rep.unknown; break;
    }
    for (const auto& pid : entry.path_ids) {
      if (verdicts[t] == Verdict::kRelevant) ++round_counts[pid].relevant;
      if (verdicts[t] == Verdict::kIrrelevant) ++round_counts[pid].irrelevant;
    }
  }
  ledger.Apply(pending.round, observed, sampled);
  for (const auto& [pid, c] : round_counts) {
    path_counts[pid].relevant += c.relevant;
    path_counts[pid].irrelevant += c.irrelevant;
  }
  rep.cost = config_.cost_per_verdict * static_cast<double>(pending.tasks.size());
  rep.precision = Precision({rep.relevant, rep.irrelevant});
  if (labels_) {
    size_t rel = 0, lab = 0;
    for (const auto& e : batch.entries) {
      if (auto l = labels_->Get(e.doc_id, rule_.tag().label)) {
        ++lab;
        if (*l) ++rel;
      }
    }
    if (lab) rep.labeled_precision = static_cast<double>(rel) / static_cast<double>(lab);
  }

  // Path precisions.
  const auto node_counts = NodeAnnotationCounts(rule_, batch);
  std::map<std::string, size_t> path_annotated;
  for (const auto& e : batch.entries) {
    for (const auto& pid : e.path_ids) ++path_annotated[pid];
  }
  const auto paths = EnumeratePaths(rule_);
  std::map<std::string, std::optional<double>> decisions;
  for (const auto& p : paths) {
    PathRoundStats ps;
    ps.path_id = p.path_id;
    ps.rendered = RenderPath(p);
    ps.annotated = path_annotated[p.path_id];
    if (auto it = round_counts.find(p.path_id); it != round_counts.end()) ps.round = it->second;
    if (auto it = path_counts.find(p.path_id); it != path_counts.end()) ps.cumulative = it->second;
    ps.precision = Precision(ps.round);
    ps.cumulative_precision = Precision(ps.cumulative);
    ps.theta = PosteriorMean(ps.cumulative.relevant, ps.cumulative.irrelevant, config_.alpha0,
                             config_.beta0);
    decisions[p.path_id] =
        ps.cumulative.total() >= config_.min_evidence ? ps.cumulative_precision : std::nullopt;
    rep.paths.push_back(std::move(ps));
  }

  // Theta over all candidate arms.
  std::vector<Arm> arms;
  std::map<std::string, Feature> arm_features;
  for (const auto& c : cands.syntactic) {
    const Feature f = c.feature();
    const std::string key = f.Key();
    arms.push_back({key, ledger.Counts(key)});
    arm_features.emplace(key, f);
  }
  std::map<std::string, const Concept*> concept_of;
  for (const auto& c : cands.conceptual) {
    const Feature f = c.feature();
    const std::string key = f.Key();
    std::vector<std::string> member_keys;
    for (const auto& m : c.group.members) member_keys.push_back(KeywordFeature(m).Key());
    arms.push_back({key, ledger.AggregateCounts(member_keys)});
    arm_features.emplace(key, f);
    concept_of[key] = &c.group;
  }
  const ThetaEstimate theta =
      SampleTheta(arms, RoundSeed(config_.seed, pending.round) ^ 0x5bd1e995ull, config_.alpha0,
                  config_.beta0);
  if (!theta.theta.empty()) {
    rep.top_candidates =
        TopK(theta, std::min<size_t>(theta.theta.size(), static_cast<size_t>(config_.children_cap)));
  }

  // Adaptation.
  const AdaptationPlan plan = DecideActions(rule_, node_counts, decisions, config_);
  AdaptationLog log;
  RuleTree next = AdaptRule(rule_, plan, theta, arm_features, config_, &retired, &log);
  // Freeze the membership of concepts that entered the rule.
  for (const auto& p : EnumeratePaths(next)) {
    for (const auto& f : p.features) {
      auto it = concept_of.find(f.Key());
      if (it == concept_of.end()) continue;
      if (!registry.Find(it->second->kind, it->second->label)) registry.Put(*it->second);
    }
  }
  rep.actions = log.actions;
  rep.warnings = log.warnings;
  if (cands.empty() && !batch.entries.empty()) rep.warnings.push_back("empty candidate set");

  // Stability, for paths that survive adaptation.
  std::set<std::string> surviving;
  for (const auto& p : EnumeratePaths(next)) surviving.insert(p.path_id);
  for (auto& ps : rep.paths) {
    if (!surviving.count(ps.path_id)) {
      windows.Erase(ps.path_id);
      continue;
    }
    if (stabilized.count(ps.path_id) || windows.Update(ps.path_id, ps.theta)) {
      stabilized.insert(ps.path_id);
    }
    ps.stabilized = stabilized.count(ps.path_id) > 0;
  }
  for (auto it = stabilized.begin(); it != stabilized.end();) {
    it = surviving.count(*it) ? std::next(it) : stabilized.erase(it);
  }
  rep.stabilized_paths.assign(stabilized.begin(), stabilized.end());
  rep.rule_after = Render(next);

  // Commit.
  rule_ = std::move(next);
  ledger_ = std::move(ledger);
  windows_ = std::move(windows);
  path_counts_ = std::move(path_counts);
  stabilized_ = std::move(stabilized);
  retired_ = std::move(retired);
  registry_ = std::move(registry);
  round_ = pending.round;
  reports_.push_back(rep);
  return rep;
}

RoundReport AdaptEngine::RunRound(FeedbackSource& source) {
  const PendingRound pending = PrepareRound();
  const std::vector<Verdict> verdicts = source.Collect(pending.tasks);
  return CompleteRound(pending, verdicts);
}

json AdaptEngine::StateJson() const {
  json counts = json::object();
  for (const auto& [pid, c] : path_counts_) {
    counts[pid] = {{"relevant", c.relevant}, {"irrelevant", c.irrelevant}};
  }
  json windows = json::object();
  for (const auto& [pid, h] : windows_.all()) windows[pid] = h;
  json concepts = json::array();
  for (const auto& [key, c] : registry_.all()) {
    concepts.push_back({{"kind", SummaryKindName(c.kind)}, {"label", c.label}, {"members", c.members}});
  }
  return {{"round", round_},
          {"rule", Render(rule_)},
          {"ledger", ledger_.ToJson()},
          {"path_counts", counts},
          {"windows", windows},
          {"stabilized", stabilized_},
          {"retired", retired_},
          {"concepts", concepts},
          {"config", config_.ToJson()}};
}

RuleEvaluation EvaluateRule(const RuleTree& rule, const Corpus& corpus, const LabelSet& labels,
                            const ConceptSource* concepts) {
  RuleEvaluation ev;
  const auto batch = AnnotateCorpus(rule, corpus, 0, concepts);
  ev.annotated = batch.entries.size();
  for (const auto& e : batch.entries) {
    if (auto l = labels.Get(e.doc_id, rule.tag().label)) {
      ++ev.labeled;
      if (*l) ++ev.relevant;
    }
  }
  if (ev.labeled) ev.precision = static_cast<double>(ev.relevant) / static_cast<double>(ev.labeled);
  return ev;
}

}  // namespace curator
