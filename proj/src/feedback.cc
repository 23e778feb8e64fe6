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

#include "curator/feedback.h"

#include <fstream>
#include <sstream>

#include "curator/error.h"
#include "curator/text.h"

namespace curator {

using nlohmann::json;

std::string TaskId(const std::string& rule_id, int round, const std::string& doc_id) {
  return rule_id + "-r" + std::to_string(round) + "-" + doc_id;
}

std::string DefaultInstructions(const std::string& tag) {
  return "Is this item relevant to '" + tag + "'? Answer Yes, No, or I don't know.";
}

Verdict Resolve(const std::vector<Verdict>& answers, size_t quorum) {
  if (quorum == 0) throw InvalidArgument("quorum must be >= 1");
  if (answers.size() < quorum) return Verdict::kUnknown;
  size_t rel = 0, irr = 0;
  for (Verdict v : answers) {
    if (v == Verdict::kRelevant) ++rel;
    if (v == Verdict::kIrrelevant) ++irr;
  }
  if (rel > irr) return Verdict::kRelevant;
  if (irr > rel) return Verdict::kIrrelevant;
  return Verdict::kUnknown;
}

std::vector<VerdictRecord> OracleVerdicts(const std::vector<LabelTask>& tasks,
                                          const LabelSet& labels) {
  std::vector<VerdictRecord> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    const auto l = labels.Get(t.doc_id, t.tag);
    const Verdict v = !l ? Verdict::kUnknown : *l ? Verdict::kRelevant : Verdict::kIrrelevant;
    out.push_back({t.task_id, "oracle", v, ""});
  }
  return out;
}

std::vector<Verdict> OracleSource::Collect(const std::vector<LabelTask>& tasks) {
  if (!labels_) throw ConfigError("oracle feedback requires a labels file");
  std::vector<Verdict> out;
  for (const auto& r : OracleVerdicts(tasks, *labels_)) out.push_back(Resolve({r.answer}, 1));
  return out;
}

ScriptedSource ScriptedSource::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open verdict script: " + path);
  return Parse(in);
}

ScriptedSource ScriptedSource::Parse(std::istream& in) {
  ScriptedSource s;
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (Trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("verdict script line " + std::to_string(n) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("verdict")) {
      throw DataError("verdict script line " + std::to_string(n) + ": need id and verdict");
    }
    const auto v = ParseVerdict(j.at("verdict").get<std::string>());
    if (!v) throw DataError("verdict script line " + std::to_string(n) + ": bad verdict");
    s.Set(j.at("id").get<std::string>(), j.value("tag", ""), *v);
  }
  return s;
}

void ScriptedSource::Set(const std::string& doc_id, const std::string& tag, Verdict v) {
  if (tag.empty()) {
    by_doc_[doc_id] = v;
  } else {
    by_doc_tag_[{doc_id, tag}] = v;
  }
}

std::vector<Verdict> ScriptedSource::Collect(const std::vector<LabelTask>& tasks) {
  std::vector<Verdict> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    if (auto it = by_doc_tag_.find({t.doc_id, t.tag}); it != by_doc_tag_.end()) {
      out.push_back(it->second);
    } else if (auto it2 = by_doc_.find(t.doc_id); it2 != by_doc_.end()) {
      out.push_back(it2->second);
    } else {
      out.push_back(Verdict::kUnknown);
    }
  }
  return out;
}

json TaskToJson(const LabelTask& t) {
  return {{"task_id", t.task_id}, {"doc_id", t.doc_id}, {"text", t.text},
          {"tag", t.tag},         {"round", t.round},   {"instructions", t.instructions}};
}

namespace {

LabelTask TaskFromJson(const json& j) {
  return {j.at("task_id").get<std::string>(), j.at("doc_id").get<std::string>(),
          j.value("text", ""),                j.at("tag").get<std::string>(),
          j.at("round").get<int>(),           j.value("instructions", "")};
}

}  // namespace

TaskQueue::TaskQueue(size_t quorum, std::string path) : quorum_(quorum), path_(std::move(path)) {
  if (quorum == 0) throw InvalidArgument("quorum must be >= 1");
  if (!path_.empty()) {
    std::ifstream in(path_);
    if (in) {
      std::stringstream ss;
      ss << in.rdbuf();
      if (!Trim(ss.str()).empty()) LoadJson(json::parse(ss.str()));
    }
  }
}

void TaskQueue::Enqueue(const std::vector<LabelTask>& tasks) {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& t : tasks) {
    if (tasks_.count(t.task_id)) continue;
    tasks_[t.task_id] = Entry{t, {}};
    order_.push_back(t.task_id);
  }
  PersistLocked();
}

bool TaskQueue::Submit(const VerdictRecord& v) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = tasks_.find(v.task_id);
  if (it == tasks_.end()) throw NotFound("unknown task: " + v.task_id);
  if (v.worker_id.empty()) throw InvalidArgument("worker_id required");
  if (!it->second.by_worker.emplace(v.worker_id, v).second) return false;
  PersistLocked();
  return true;
}

CollectResult TaskQueue::Collect(int round) const {
  std::lock_guard<std::mutex> lock(mu_);
  CollectResult r;
  for (const auto& id : order_) {
    const Entry& e = tasks_.at(id);
    if (e.task.round != round) continue;
    if (e.by_worker.size() < quorum_) {
      r.pending.push_back(id);
      continue;
    }
    std::vector<Verdict> answers;
    for (const auto& [w, rec] : e.by_worker) answers.push_back(rec.answer);
    r.resolved[id] = Resolve(answers, quorum_);
  }
  return r;
}

std::vector<LabelTask> TaskQueue::Tasks(std::optional<int> round) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<LabelTask> out;
  for (const auto& id : order_) {
    const auto& t = tasks_.at(id).task;
    if (!round || t.round == *round) out.push_back(t);
  }
  return out;
}

std::optional<LabelTask> TaskQueue::Task(const std::string& task_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) return std::nullopt;
  return it->second.task;
}

json TaskQueue::ToJson() const {
  std::lock_guard<std::mutex> lock(mu_);
  return ToJsonLocked();
}

json TaskQueue::ToJsonLocked() const {
  json tasks = json::array();
  for (const auto& id : order_) {
    const Entry& e = tasks_.at(id);
    json verdicts = json::array();
    for (const auto& [w, rec] : e.by_worker) {
      verdicts.push_back({{"worker_id", w},
                          {"answer", VerdictName(rec.answer)},
                          {"timestamp", rec.timestamp}});
    }
    json t = TaskToJson(e.task);
    t["verdicts"] = verdicts;
    tasks.push_back(t);
  }
  return {{"quorum", quorum_}, {"tasks", tasks}};
}

void TaskQueue::LoadJson(const json& j) {
  tasks_.clear();
  order_.clear();
  for (const auto& t : j.at("tasks")) {
    Entry e{TaskFromJson(t), {}};
    for (const auto& v : t.value("verdicts", json::array())) {
      const auto ans = ParseVerdict(v.at("answer").get<std::string>());
      if (!ans) throw DataError("task queue: bad answer");
      const std::string w = v.at("worker_id").get<std::string>();
      e.by_worker[w] = {e.task.task_id, w, *ans, v.value("timestamp", "")};
    }
    order_.push_back(e.task.task_id);
    tasks_[e.task.task_id] = std::move(e);
  }
}

void TaskQueue::PersistLocked() const {
  if (path_.empty()) return;
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Unavailable("cannot write task queue: " + path_);
    out << ToJsonLocked().dump(2) << "\n";
  }
  std::rename(tmp.c_str(), path_.c_str());
}

}  // namespace curator
