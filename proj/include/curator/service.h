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

#ifndef CURATOR_SERVICE_H_
#define CURATOR_SERVICE_H_

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "curator/adapt.h"
#include "curator/corpus.h"
#include "curator/error.h"
#include "curator/feedback.h"
#include "curator/knowledge.h"
#include "curator/summarize.h"
#include "json.hpp"

namespace curator {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

int HttpStatusFor(ErrorCode code);

// JSON API under /v1. Handle() is transport-free; Serve() binds it to HTTP.
//
//   POST /v1/corpora                 JSONL body, or {"corpus", "lexicon"?, "labels"?} paths
//   GET  /v1/summaries?kind=         concept summaries
//   POST /v1/rules                   {"rule": rule-file text} or {"tag", "expr"}, "config"?
//   GET  /v1/rules/{id}
//   POST /v1/rules/{id}/rounds?feedback=oracle|human
//   GET  /v1/rules/{id}/report
//   GET  /v1/rules/{id}/events?from=
//   GET  /v1/tasks?round=&rule=
//   POST /v1/verdicts                {task_id, worker_id, answer} or {"verdicts": [...]}
//   POST /v1/rank                    {"concepts": [...], "top"?}
//   POST /v1/concept-rule            {"expr", "top"?, "concepts"?}
class Service {
 public:
  explicit Service(std::string workspace);
  ~Service();

  ApiResponse Handle(const std::string& method, const std::string& target,
                     const std::string& body);

  // Blocks serving HTTP on host:port until Stop().
  void Serve(const std::string& host, int port);
  void Stop();

 private:
  struct RuleSession {
    std::mutex mu;
    std::shared_ptr<Corpus> corpus;  // kept alive for the engine
    std::shared_ptr<KnowledgeBase> kb;
    std::shared_ptr<LabelSet> labels;
    std::unique_ptr<AdaptEngine> engine;
    std::optional<PendingRound> pending;
    bool in_flight = false;
    std::vector<nlohmann::json> events;
  };

  ApiResponse PostCorpora(const std::string& body);
  ApiResponse GetSummaries(const std::map<std::string, std::string>& query);
  ApiResponse PostRules(const std::string& body);
  ApiResponse GetRule(const std::string& id);
  ApiResponse PostRound(const std::string& id, const std::map<std::string, std::string>& query);
  ApiResponse GetReport(const std::string& id);
  ApiResponse GetEvents(const std::string& id, const std::map<std::string, std::string>& query);
  ApiResponse GetTasks(const std::map<std::string, std::string>& query);
  ApiResponse PostVerdicts(const std::string& body);
  ApiResponse PostRank(const std::string& body);
  ApiResponse PostConceptRule(const std::string& body);

  std::shared_ptr<RuleSession> Session(const std::string& id);
  void RequireCorpus() const;
  void Event(RuleSession& s, int round, const std::string& type, nlohmann::json data = {});
  // Completes the session's pending human round once every task resolved.
  void MaybeComplete(const std::string& id, RuleSession& s);
  void PersistReport(const std::string& id, const RoundReport& r);
  std::optional<Concept> ResolveConcept(const std::string& name, const nlohmann::json& inline_concepts);

  std::string workspace_;
  std::mutex mu_;  // guards everything below except session internals
  std::atomic<bool> ingesting_{false};
  std::shared_ptr<Corpus> corpus_;
  std::shared_ptr<KnowledgeBase> kb_;
  std::shared_ptr<LabelSet> labels_;
  std::optional<SummarySet> summaries_;
  std::map<std::string, std::shared_ptr<RuleSession>> rules_;
  int next_rule_ = 1;
  TaskQueue queue_;
  void* server_ = nullptr;
};

}  // namespace curator

#endif  // CURATOR_SERVICE_H_
