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

#ifndef CURATOR_FEEDBACK_H_
#define CURATOR_FEEDBACK_H_

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "curator/bandit.h"
#include "curator/corpus.h"
#include "json.hpp"

namespace curator {

struct LabelTask {
  std::string task_id;
  std::string doc_id;
  std::string text;
  std::string tag;
  int round = 0;
  std::string instructions;
};

struct VerdictRecord {
  std::string task_id;
  std::string worker_id;
  Verdict answer = Verdict::kUnknown;
  std::string timestamp;
};

std::string TaskId(const std::string& rule_id, int round, const std::string& doc_id);
std::string DefaultInstructions(const std::string& tag);

// Majority of non-Unknown answers once `quorum` answers exist; ties, too few
// answers, or only Unknown give Unknown.
Verdict Resolve(const std::vector<Verdict>& answers, size_t quorum = 1);

// One resolved verdict per task, in task order.
class FeedbackSource {
 public:
  virtual ~FeedbackSource() = default;
  virtual std::vector<Verdict> Collect(const std::vector<LabelTask>& tasks) = 0;
  virtual const char* name() const = 0;
};

// Ground-truth labels: Relevant iff labeled relevant for the task's tag;
// unlabeled documents are Unknown.
std::vector<VerdictRecord> OracleVerdicts(const std::vector<LabelTask>& tasks,
                                          const LabelSet& labels);

class OracleSource : public FeedbackSource {
 public:
  explicit OracleSource(const LabelSet* labels) : labels_(labels) {}
  std::vector<Verdict> Collect(const std::vector<LabelTask>& tasks) override;
  const char* name() const override { return "oracle"; }

 private:
  const LabelSet* labels_;
};

// Replays a verdict file: JSON Lines {"id": doc id, "tag"?: str, "verdict":
// relevant|irrelevant|unknown}. Missing entries are Unknown.
class ScriptedSource : public FeedbackSource {
 public:
  static ScriptedSource Load(const std::string& path);
  static ScriptedSource Parse(std::istream& in);
  void Set(const std::string& doc_id, const std::string& tag, Verdict v);
  std::vector<Verdict> Collect(const std::vector<LabelTask>& tasks) override;
  const char* name() const override { return "scripted"; }

 private:
  std::map<std::pair<std::string, std::string>, Verdict> by_doc_tag_;
  std::map<std::string, Verdict> by_doc_;
};

struct CollectResult {
  std::map<std::string, Verdict> resolved;  // task id -> verdict
  std::vector<std::string> pending;
};

// Human labeling queue. Thread-safe; optionally persisted to a JSON file on
// every mutation.
class TaskQueue {
 public:
  explicit TaskQueue(size_t quorum = 1, std::string path = "");

  void Enqueue(const std::vector<LabelTask>& tasks);
  // False when (task, worker) already answered; NotFound for unknown tasks.
  bool Submit(const VerdictRecord& v);
  CollectResult Collect(int round) const;
  std::vector<LabelTask> Tasks(std::optional<int> round) const;
  std::optional<LabelTask> Task(const std::string& task_id) const;
  size_t quorum() const { return quorum_; }

  nlohmann::json ToJson() const;
  void LoadJson(const nlohmann::json& j);

 private:
  struct Entry {
    LabelTask task;
    std::map<std::string, VerdictRecord> by_worker;
  };
  void PersistLocked() const;
  nlohmann::json ToJsonLocked() const;

  mutable std::mutex mu_;
  size_t quorum_;
  std::string path_;
  std::map<std::string, Entry> tasks_;
  std::vector<std::string> order_;
};

nlohmann::json TaskToJson(const LabelTask& t);

}  // namespace curator

#endif  // CURATOR_FEEDBACK_H_
