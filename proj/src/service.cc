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

#include "curator/service.h"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "curator/concept_rule.h"
#include "curator/error.h"
#include "curator/json_io.h"
#include "curator/rank.h"
#include "curator/rule_lang.h"
#include "curator/text.h"
#include "httplib.h"

namespace curator {

using nlohmann::json;
namespace fs = std::filesystem;

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kDataError: return 400;
    case ErrorCode::kConfig: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kUnavailable: return 503;
  }
  return 500;
}

namespace {

ApiResponse ErrorResponse(int status, const std::string& code, const std::string& message,
                          json extra = json::object()) {
  json body = {{"code", code}, {"message", message}};
  for (auto& [k, v] : extra.items()) body[k] = v;
  return {status, body};
}

json ParseBody(const std::string& body) {
  if (Trim(body).empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string UrlDecode(const std::string& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::map<std::string, std::string> ParseQuery(const std::string& q) {
  std::map<std::string, std::string> out;
  for (const auto& part : SplitOn(q, '&')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      out[UrlDecode(part)] = "";
    } else {
      out[UrlDecode(part.substr(0, eq))] = UrlDecode(part.substr(eq + 1));
    }
  }
  return out;
}

int QueryInt(const std::map<std::string, std::string>& q, const std::string& key, int def) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return def;
  try {
    size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("x");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("query parameter " + key + " must be an integer");
  }
}

}  // namespace

Service::Service(std::string workspace)
    : workspace_(std::move(workspace)),
      queue_(1, workspace_.empty() ? "" : (fs::path(workspace_) / "tasks.json").string()) {
  if (!workspace_.empty()) {
    std::error_code ec;
    fs::create_directories(workspace_, ec);
    if (ec) throw ConfigError("cannot create workspace " + workspace_ + ": " + ec.message());
  }
}

Service::~Service() { Stop(); }

ApiResponse Service::Handle(const std::string& method, const std::string& target,
                            const std::string& body) {
  std::string path = target, query_string;
  if (auto q = target.find('?'); q != std::string::npos) {
    path = target.substr(0, q);
    query_string = target.substr(q + 1);
  }
  try {
    const auto query = ParseQuery(query_string);
    if (path.rfind("/v1/", 0) != 0) throw NotFound("unknown route: " + path);
    const std::string route = path.substr(3);
    std::smatch m;
    static const std::regex kRule(R"(^/rules/([A-Za-z0-9_\-]+)$)");
    static const std::regex kRounds(R"(^/rules/([A-Za-z0-9_\-]+)/rounds$)");
    static const std::regex kReport(R"(^/rules/([A-Za-z0-9_\-]+)/report$)");
    static const std::regex kEvents(R"(^/rules/([A-Za-z0-9_\-]+)/events$)");

    if (method == "POST" && route == "/corpora") return PostCorpora(body);
    if (ingesting_) {
      return ErrorResponse(503, "unavailable", "corpus ingestion in progress");
    }
    if (method == "GET" && route == "/summaries") return GetSummaries(query);
    if (method == "POST" && route == "/rules") return PostRules(body);
    if (method == "GET" && std::regex_match(route, m, kRule)) return GetRule(m[1]);
    if (method == "POST" && std::regex_match(route, m, kRounds)) return PostRound(m[1], query);
    if (method == "GET" && std::regex_match(route, m, kReport)) return GetReport(m[1]);
    if (method == "GET" && std::regex_match(route, m, kEvents)) return GetEvents(m[1], query);
    if (method == "GET" && route == "/tasks") return GetTasks(query);
    if (method == "POST" && route == "/verdicts") return PostVerdicts(body);
    if (method == "POST" && route == "/rank") return PostRank(body);
    if (method == "POST" && route == "/concept-rule") return PostConceptRule(body);
    return ErrorResponse(404, "not_found", "unknown route: " + method + " " + path);
  } catch (const ParseError& e) {
    return ErrorResponse(400, "invalid_argument", e.what(),
                         {{"offset", e.offset()}, {"line", e.line()}, {"column", e.column()},
                          {"expected", e.expected()}});
  } catch (const Error& e) {
    return ErrorResponse(HttpStatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const json::exception& e) {
    return ErrorResponse(400, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

void Service::RequireCorpus() const {
  if (!corpus_) throw NotFound("no corpus loaded; POST /v1/corpora first");
}

ApiResponse Service::PostCorpora(const std::string& body) {
  bool expected = false;
  if (!ingesting_.compare_exchange_strong(expected, true)) {
    return ErrorResponse(503, "unavailable", "corpus ingestion in progress");
  }
  struct Reset {
    std::atomic<bool>* flag;
    ~Reset() { *flag = false; }
  } reset{&ingesting_};

  auto corpus = std::make_shared<Corpus>();
  auto kb = std::make_shared<KnowledgeBase>();
  std::shared_ptr<LabelSet> labels;
  IngestResult result;

  json req;
  const std::string trimmed = Trim(body);
  bool paths = false;
  if (!trimmed.empty() && trimmed.front() == '{') {
    try {
      req = json::parse(trimmed);
      paths = req.is_object() && req.contains("corpus");
    } catch (const json::exception&) {
      paths = false;  // multi-line JSONL
    }
  }
  if (paths) {
    result = corpus->IngestFile(req.at("corpus").get<std::string>());
    if (req.contains("lexicon")) {
      *kb = KnowledgeBase::LoadDirectory(req.at("lexicon").get<std::string>());
    }
    if (req.contains("labels")) {
      labels = std::make_shared<LabelSet>(LabelSet::Load(req.at("labels").get<std::string>()));
    }
  } else {
    if (trimmed.empty()) throw InvalidArgument("empty corpus body");
    std::istringstream in(body);
    result = corpus->Ingest(in);
  }
  kb->AttachEntities(corpus.get());

  std::lock_guard<std::mutex> lock(mu_);
  corpus_ = corpus;
  kb_ = kb;
  labels_ = labels;
  summaries_.reset();
  return {201,
          {{"documents", corpus->size()},
           {"added", result.added},
           {"unchanged", result.unchanged},
           {"vocabulary", result.stats.vocabulary},
           {"labels", labels ? labels->size() : 0},
           {"warnings", result.warnings}}};
}

ApiResponse Service::GetSummaries(const std::map<std::string, std::string>& query) {
  std::lock_guard<std::mutex> lock(mu_);
  RequireCorpus();
  std::vector<SummaryKind> kinds(std::begin(kAllSummaryKinds), std::end(kAllSummaryKinds));
  if (auto it = query.find("kind"); it != query.end() && !it->second.empty()) {
    auto k = ParseSummaryKind(it->second);
    if (!k) throw InvalidArgument("unknown summary kind: " + it->second);
    kinds = {*k};
  }
  if (!summaries_) {
    std::vector<SummaryKind> all(std::begin(kAllSummaryKinds), std::end(kAllSummaryKinds));
    summaries_ = BuildSummaries(*corpus_, *kb_, all);
  }
  SummarySet view;
  view.wedge_count = summaries_->wedge_count;
  for (SummaryKind k : kinds) {
    if (auto it = summaries_->kinds.find(k); it != summaries_->kinds.end()) view.kinds[k] = it->second;
    if (auto it = summaries_->errors.find(k); it != summaries_->errors.end()) view.errors[k] = it->second;
  }
  return {200, SummariesToJson(view)};
}

ApiResponse Service::PostRules(const std::string& body) {
  const json req = ParseBody(body);
  AdaptConfig config;
  if (req.contains("config")) {
    for (auto& [k, v] : req.at("config").items()) {
      config.Set(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
  config.Validate();
  RuleFile file;
  if (req.contains("rule")) {
    file = ParseRuleFile(req.at("rule").get<std::string>());
  } else if (req.contains("expr") && req.contains("tag")) {
    file.tag = Tag{req.at("tag").get<std::string>()};
    file.expr = ParseRule(req.at("expr").get<std::string>());
  } else {
    throw InvalidArgument("POST /rules needs \"rule\" (rule file text) or \"tag\" and \"expr\"");
  }

  std::lock_guard<std::mutex> lock(mu_);
  RequireCorpus();
  const std::string id = "r" + std::to_string(next_rule_);
  DnfOptions opts;
  opts.children_cap = config.children_cap;
  RuleTree tree = ToDnf(file.expr, file.tag, opts, id);
  auto s = std::make_shared<RuleSession>();
  s->corpus = corpus_;
  s->kb = kb_;
  s->labels = labels_;
  s->engine = std::make_unique<AdaptEngine>(corpus_.get(), kb_.get(), std::move(tree), config);
  if (labels_) s->engine->set_labels(labels_.get());
  ++next_rule_;
  rules_[id] = s;
  return {201, {{"rule_id", id}, {"rule", RuleToJson(s->engine->rule())}}};
}

std::shared_ptr<Service::RuleSession> Service::Session(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = rules_.find(id);
  if (it == rules_.end()) throw NotFound("unknown rule: " + id);
  return it->second;
}

ApiResponse Service::GetRule(const std::string& id) {
  auto s = Session(id);
  std::lock_guard<std::mutex> lock(s->mu);
  const auto& e = *s->engine;
  return {200,
          {{"rule_id", id},
           {"rule", RuleToJson(e.rule())},
           {"rounds_completed", e.reports().size()},
           {"pending_round", s->pending ? json(s->pending->round) : json(nullptr)},
           {"stabilized_paths", e.stabilized()},
           {"config", e.config().ToJson()},
           {"ledger", e.ledger().ToJson()}}};
}

void Service::Event(RuleSession& s, int round, const std::string& type, json data) {
  json e = {{"index", s.events.size()}, {"round", round}, {"type", type}};
  if (!data.is_null()) e["data"] = std::move(data);
  s.events.push_back(std::move(e));
}

void Service::PersistReport(const std::string& id, const RoundReport& r) {
  if (workspace_.empty()) return;
  const fs::path dir = fs::path(workspace_) / "rules" / id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return;
  WriteJsonFile((dir / ("round_" + std::to_string(r.round) + ".json")).string(), r.ToJson());
}

ApiResponse Service::PostRound(const std::string& id,
                               const std::map<std::string, std::string>& query) {
  auto s = Session(id);
  const std::string mode = query.count("feedback") ? query.at("feedback") : "oracle";
  if (mode != "oracle" && mode != "human") {
    throw InvalidArgument("feedback must be oracle or human");
  }
  {
    std::lock_guard<std::mutex> lock(s->mu);
    if (s->in_flight || s->pending) {
      return ErrorResponse(409, "conflict", "a round is already in flight for rule " + id);
    }
    if (mode == "oracle" && !s->labels) {
      throw ConfigError("oracle feedback requires labels; load them with the corpus");
    }
    s->in_flight = true;
  }
  struct Clear {
    RuleSession* s;
    ~Clear() {
      std::lock_guard<std::mutex> lock(s->mu);
      s->in_flight = false;
    }
  } clear{s.get()};

  PendingRound pending = s->engine->PrepareRound();
  const int round = pending.round;
  std::lock_guard<std::mutex> lock(s->mu);
  Event(*s, round, "round_started");
  Event(*s, round, "sample_issued",
        {{"annotated", pending.batch.entries.size()}, {"tasks", pending.tasks.size()}});
  if (mode == "oracle") {
    OracleSource oracle(s->labels.get());
    const auto verdicts = oracle.Collect(pending.tasks);
    Event(*s, round, "verdicts", {{"received", verdicts.size()}, {"expected", pending.tasks.size()}});
    const RoundReport rep = s->engine->CompleteRound(pending, verdicts);
    Event(*s, round, "adapted", {{"actions", rep.actions.size()}});
    PersistReport(id, rep);
    Event(*s, round, "report_ready");
    return {202, {{"rule_id", id}, {"round", round}, {"feedback", mode}, {"report", rep.ToJson()}}};
  }
  queue_.Enqueue(pending.tasks);
  const size_t n = pending.tasks.size();
  s->pending = std::move(pending);
  json resp = {{"rule_id", id}, {"round", round}, {"feedback", mode}, {"tasks", n}};
  if (n == 0) {
    MaybeComplete(id, *s);
    resp["completed"] = !s->pending.has_value();
  }
  return {202, resp};
}

void Service::MaybeComplete(const std::string& id, RuleSession& s) {
  if (!s.pending) return;
  const auto collected = queue_.Collect(s.pending->round);
  std::vector<Verdict> verdicts;
  size_t received = 0;
  for (const auto& t : s.pending->tasks) {
    auto it = collected.resolved.find(t.task_id);
    if (it != collected.resolved.end()) ++received;
  }
  const int round = s.pending->round;
  if (!s.events.empty() && s.events.back().at("type") == "verdicts") s.events.pop_back();
  Event(s, round, "verdicts", {{"received", received}, {"expected", s.pending->tasks.size()}});
  if (received < s.pending->tasks.size()) return;
  for (const auto& t : s.pending->tasks) verdicts.push_back(collected.resolved.at(t.task_id));
  const RoundReport rep = s.engine->CompleteRound(*s.pending, verdicts);
  s.pending.reset();
  Event(s, round, "adapted", {{"actions", rep.actions.size()}});
  PersistReport(id, rep);
  Event(s, round, "report_ready");
}

ApiResponse Service::GetReport(const std::string& id) {
  auto s = Session(id);
  std::lock_guard<std::mutex> lock(s->mu);
  json rounds = json::array();
  for (const auto& r : s->engine->reports()) rounds.push_back(r.ToJson());
  return {200, {{"rule_id", id}, {"rounds", rounds}, {"rule", Render(s->engine->rule())}}};
}

ApiResponse Service::GetEvents(const std::string& id,
                               const std::map<std::string, std::string>& query) {
  auto s = Session(id);
  const int from = QueryInt(query, "from", 0);
  if (from < 0) throw InvalidArgument("from must be >= 0");
  std::lock_guard<std::mutex> lock(s->mu);
  json events = json::array();
  for (size_t i = static_cast<size_t>(from); i < s->events.size(); ++i) events.push_back(s->events[i]);
  return {200, {{"rule_id", id}, {"events", events}, {"next", s->events.size()}}};
}

ApiResponse Service::GetTasks(const std::map<std::string, std::string>& query) {
  std::optional<int> round;
  if (query.count("round")) round = QueryInt(query, "round", 0);
  const std::string rule = query.count("rule") ? query.at("rule") : "";
  json tasks = json::array();
  std::map<int, CollectResult> collected;
  for (const auto& t : queue_.Tasks(round)) {
    if (!rule.empty() && t.task_id.rfind(rule + "-", 0) != 0) continue;
    if (!collected.count(t.round)) collected[t.round] = queue_.Collect(t.round);
    json j = TaskToJson(t);
    const auto& c = collected[t.round];
    auto it = c.resolved.find(t.task_id);
    j["status"] = it == c.resolved.end() ? "pending" : "resolved";
    if (it != c.resolved.end()) j["verdict"] = VerdictName(it->second);
    tasks.push_back(j);
  }
  return {200, {{"tasks", tasks}, {"page_size", 10}}};
}

ApiResponse Service::PostVerdicts(const std::string& body) {
  const json req = ParseBody(body);
  std::vector<json> items;
  if (req.contains("verdicts")) {
    for (const auto& v : req.at("verdicts")) items.push_back(v);
  } else {
    items.push_back(req);
  }
  // Validate everything before accepting anything.
  std::vector<VerdictRecord> records;
  for (const auto& v : items) {
    if (!v.is_object() || !v.contains("task_id") || !v.contains("worker_id") ||
        !v.contains("answer")) {
      throw InvalidArgument("verdict needs task_id, worker_id, answer");
    }
    const auto answer = ParseVerdict(v.at("answer").get<std::string>());
    if (!answer) throw InvalidArgument("answer must be relevant, irrelevant, or unknown");
    VerdictRecord r{v.at("task_id").get<std::string>(), v.at("worker_id").get<std::string>(),
                    *answer, v.value("timestamp", "")};
    if (!queue_.Task(r.task_id)) throw NotFound("unknown task: " + r.task_id);
    records.push_back(std::move(r));
  }
  size_t accepted = 0, duplicates = 0;
  std::set<std::string> touched_rules;
  for (const auto& r : records) {
    if (queue_.Submit(r)) {
      ++accepted;
    } else {
      ++duplicates;
    }
    const auto dash = r.task_id.find("-r");
    if (dash != std::string::npos) touched_rules.insert(r.task_id.substr(0, dash));
  }
  json completed = json::array();
  for (const auto& id : touched_rules) {
    std::shared_ptr<RuleSession> s;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = rules_.find(id);
      if (it == rules_.end()) continue;
      s = it->second;
    }
    std::lock_guard<std::mutex> lock(s->mu);
    const bool was_pending = s->pending.has_value();
    const int round = was_pending ? s->pending->round : 0;
    MaybeComplete(id, *s);
    if (was_pending && !s->pending) completed.push_back({{"rule_id", id}, {"round", round}});
  }
  return {200, {{"accepted", accepted}, {"duplicates", duplicates}, {"completed_rounds", completed}}};
}

std::optional<Concept> Service::ResolveConcept(const std::string& name, const json& inline_concepts) {
  if (inline_concepts.is_array()) {
    for (const auto& c : inline_concepts) {
      if (c.value("label", "") != name) continue;
      Concept con;
      con.label = name;
      const auto kind = ParseSummaryKind(c.value("kind", "topic"));
      if (!kind) throw InvalidArgument("unknown concept kind for " + name);
      con.kind = *kind;
      con.members = c.at("members").get<std::vector<std::string>>();
      con.weight = c.value("weight", 1.0);
      return con;
    }
  }
  if (summaries_) {
    for (const auto& [kind, entries] : summaries_->kinds) {
      for (const auto& e : entries) {
        if (ToLower(e.group.label) == ToLower(name)) return e.group;
      }
    }
  }
  if (kb_) {
    if (const Concept* c = ResolveByName(*kb_, name)) return *c;
  }
  return std::nullopt;
}

ApiResponse Service::PostRank(const std::string& body) {
  const json req = ParseBody(body);
  std::lock_guard<std::mutex> lock(mu_);
  RequireCorpus();
  const int top = req.value("top", 20);
  if (top < 1) throw InvalidArgument("top must be >= 1");
  const Preference pref = PreferenceFromJson(req, kb_.get());
  const auto ranked = Rank(pref, *corpus_, static_cast<size_t>(top));
  json concepts = json::array();
  for (const auto& c : pref.concepts) concepts.push_back(ConceptToJson(c));
  return {200, {{"concepts", concepts}, {"queries", ConceptQueries(pref).size()},
                {"items", RankedToJson(ranked, pref)}}};
}

ApiResponse Service::PostConceptRule(const std::string& body) {
  const json req = ParseBody(body);
  if (!req.contains("expr")) throw InvalidArgument("concept-rule needs \"expr\"");
  const ConceptExpr expr = ParseConceptRule(req.at("expr").get<std::string>());
  std::lock_guard<std::mutex> lock(mu_);
  RequireCorpus();
  const int top = req.value("top", 20);
  if (top < 1) throw InvalidArgument("top must be >= 1");
  const json inline_concepts = req.value("concepts", json::array());
  Preference used;
  const auto ranked = EvalConceptRule(
      expr, *corpus_, [&](const std::string& n) { return ResolveConcept(n, inline_concepts); },
      static_cast<size_t>(top), &used);
  return {200, {{"expr", RenderConceptRule(expr)}, {"items", RankedToJson(ranked, used)}}};
}

void Service::Serve(const std::string& host, int port) {
  auto* server = new httplib::Server();
  server_ = server;
  const auto cors = [](httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
  };
  const auto dispatch = [this, cors](const httplib::Request& req, httplib::Response& res) {
    std::string target = req.path;
    std::string qs;
    for (const auto& [k, v] : req.params) {
      qs += (qs.empty() ? "" : "&") + httplib::detail::encode_query_param(k) + "=" +
            httplib::detail::encode_query_param(v);
    }
    if (!qs.empty()) target += "?" + qs;
    std::string body = req.body;
    if (req.is_multipart_form_data() && !req.files.empty()) body = req.files.begin()->second.content;
    const ApiResponse r = Handle(req.method, target, body);
    cors(res);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server->Get(".*", dispatch);
  server->Post(".*", dispatch);
  server->Options(".*", [cors](const httplib::Request&, httplib::Response& res) {
    cors(res);
    res.status = 204;
  });
  if (!server->listen(host, port)) {
    server_ = nullptr;
    delete server;
    throw Unavailable("cannot listen on " + host + ":" + std::to_string(port));
  }
  server_ = nullptr;
  delete server;
}

void Service::Stop() {
  if (server_) static_cast<httplib::Server*>(server_)->stop();
}

}  // namespace curator
