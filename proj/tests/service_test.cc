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

#include <gtest/gtest.h>

#include <thread>

#include "curator/service.h"
#include "curator/synth.h"
#include "test_util.h"

namespace curator {
namespace {

using nlohmann::json;

struct ServiceFixture : ::testing::Test {
  std::string dir;
  std::unique_ptr<Service> svc;

  void SetUp() override {
    dir = testing::TempDir(std::string("svc_") +
                           ::testing::UnitTest::GetInstance()->current_test_info()->name());
    SynthParams p;
    p.docs = 3000;
    p.seed = 2;
    WriteSynthetic(GenerateSynthetic(p), dir + "/data");
    svc = std::make_unique<Service>(dir + "/ws");
  }

  ApiResponse Call(const std::string& method, const std::string& target, const json& body = {}) {
    return svc->Handle(method, target, body.is_null() ? "" : body.dump());
  }

  void LoadCorpus() {
    const auto r = Call("POST", "/v1/corpora",
                        {{"corpus", dir + "/data/corpus.jsonl"},
                         {"lexicon", dir + "/data/lexicon"},
                         {"labels", dir + "/data/labels.jsonl"}});
    ASSERT_EQ(r.status, 201) << r.body.dump();
  }

  std::string CreateRule() {
    const auto r = Call("POST", "/v1/rules", {{"rule", testing::ReadFile(dir + "/data/seed.rule")}});
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body.at("rule_id").get<std::string>();
  }
};

TEST_F(ServiceFixture, CreateAndReadRule) {
  LoadCorpus();
  const auto created = Call("POST", "/v1/rules",
                            {{"tag", "health"},
                             {"expr", "Tweet.Keyword.Contains('a') AND (Tweet.Keyword.Contains('b') "
                                      "OR Tweet.Keyword.Contains('c'))"}});
  ASSERT_EQ(created.status, 201);
  EXPECT_EQ(created.body["rule"]["paths"].size(), 2u);
  const std::string id = created.body["rule_id"];
  const auto got = Call("GET", "/v1/rules/" + id);
  EXPECT_EQ(got.status, 200);
  EXPECT_EQ(got.body["rule"]["dsl"], created.body["rule"]["dsl"]);
  EXPECT_EQ(Call("GET", "/v1/rules/nope").status, 404);
}

TEST_F(ServiceFixture, ErrorMapping) {
  EXPECT_EQ(Call("POST", "/v1/rules", {{"tag", "x"}, {"expr", "Tweet.Keyword.Contains('a')"}}).status,
            404);  // no corpus yet
  LoadCorpus();
  const auto bad = Call("POST", "/v1/rules", {{"tag", "x"}, {"expr", "Tweet.Keyword.Contains('a' AND"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_TRUE(bad.body.contains("offset"));
  EXPECT_EQ(svc->Handle("POST", "/v1/rules", "{not json").status, 400);
  EXPECT_EQ(Call("GET", "/v1/nothing").status, 404);
  EXPECT_EQ(Call("POST", "/v1/verdicts", {{"task_id", "x"}, {"worker_id", "w"}, {"answer", "yes"}}).status,
            404);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kConflict), 409);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kUnavailable), 503);
}

TEST_F(ServiceFixture, OracleRoundAndEvents) {
  LoadCorpus();
  const std::string id = CreateRule();
  EXPECT_TRUE(Call("GET", "/v1/rules/" + id + "/events").body["events"].empty());
  const auto r = Call("POST", "/v1/rules/" + id + "/rounds?feedback=oracle");
  ASSERT_EQ(r.status, 202) << r.body.dump();
  EXPECT_EQ(r.body["report"]["round"], 1);
  const auto ev = Call("GET", "/v1/rules/" + id + "/events");
  std::vector<std::string> types;
  for (const auto& e : ev.body["events"]) types.push_back(e["type"]);
  EXPECT_EQ(types, (std::vector<std::string>{"round_started", "sample_issued", "verdicts", "adapted",
                                             "report_ready"}));
  const auto resumed = Call("GET", "/v1/rules/" + id + "/events?from=3");
  EXPECT_EQ(resumed.body["events"].size(), 2u);
  EXPECT_EQ(resumed.body["events"][0]["type"], "adapted");
  const auto report = Call("GET", "/v1/rules/" + id + "/report");
  EXPECT_EQ(report.body["rounds"].size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir + "/ws/rules/" + id + "/round_1.json"));
}

TEST_F(ServiceFixture, ConcurrentRoundsOneWins) {
  LoadCorpus();
  const std::string id = CreateRule();
  int statuses[2] = {0, 0};
  std::thread a([&] { statuses[0] = Call("POST", "/v1/rules/" + id + "/rounds?feedback=human").status; });
  std::thread b([&] { statuses[1] = Call("POST", "/v1/rules/" + id + "/rounds?feedback=human").status; });
  a.join();
  b.join();
  EXPECT_EQ(std::min(statuses[0], statuses[1]), 202);
  EXPECT_EQ(std::max(statuses[0], statuses[1]), 409);
}

TEST_F(ServiceFixture, HumanRoundVerdictLoop) {
  LoadCorpus();
  const std::string id = CreateRule();
  ASSERT_EQ(Call("POST", "/v1/rules/" + id + "/rounds?feedback=human").status, 202);
  const auto tasks = Call("GET", "/v1/tasks?round=1&rule=" + id).body["tasks"];
  ASSERT_GE(tasks.size(), 2u);
  const std::string first = tasks[0]["task_id"];
  auto r = Call("POST", "/v1/verdicts", {{"task_id", first}, {"worker_id", "w1"}, {"answer", "yes"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["accepted"], 1);
  const auto state = Call("GET", "/v1/rules/" + id).body;
  r = Call("POST", "/v1/verdicts", {{"task_id", first}, {"worker_id", "w1"}, {"answer", "no"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["duplicates"], 1);
  EXPECT_EQ(Call("GET", "/v1/rules/" + id).body, state);  // ledger unchanged
  // A batch with one bad entry is rejected whole.
  json bad = {{"verdicts", json::array({{{"task_id", tasks[1]["task_id"]}, {"worker_id", "w1"}, {"answer", "yes"}},
                                        {{"task_id", "missing"}, {"worker_id", "w1"}, {"answer", "yes"}}})}};
  EXPECT_EQ(Call("POST", "/v1/verdicts", bad).status, 404);
  json batch = {{"verdicts", json::array()}};
  for (size_t i = 1; i < tasks.size(); ++i)
    batch["verdicts"].push_back({{"task_id", tasks[i]["task_id"]}, {"worker_id", "w1"}, {"answer", "no"}});
  r = Call("POST", "/v1/verdicts", batch);
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body["completed_rounds"].size(), 1u);
  const auto after = Call("GET", "/v1/rules/" + id).body;
  EXPECT_EQ(after["rounds_completed"], 1);
  EXPECT_FALSE(after["ledger"]["features"].empty());
  EXPECT_EQ(Call("POST", "/v1/rules/" + id + "/rounds?feedback=human").status, 202);
}

TEST_F(ServiceFixture, SummariesRankAndConceptRule) {
  LoadCorpus();
  const auto s = Call("GET", "/v1/summaries?kind=topic");
  ASSERT_EQ(s.status, 200) << s.body.dump();
  const auto ranked = Call("POST", "/v1/rank",
                           {{"concepts", json::array({{{"label", "x"}, {"members", {"lolo"}}}})}, {"top", 5}});
  EXPECT_EQ(ranked.status, 200) << ranked.body.dump();
  EXPECT_LE(ranked.body["items"].size(), 5u);
  EXPECT_EQ(Call("POST", "/v1/rank", {{"concepts", json::array()}}).status, 400);
  const auto cr = Call("POST", "/v1/concept-rule",
                       {{"expr", "A OR B"},
                        {"concepts", json::array({{{"label", "A"}, {"members", {"lolo"}}},
                                                  {{"label", "B"}, {"members", {"mimo"}}}})}});
  EXPECT_EQ(cr.status, 200) << cr.body.dump();
  EXPECT_EQ(Call("POST", "/v1/concept-rule", {{"expr", "Nope"}}).status, 404);
}

TEST_F(ServiceFixture, RawJsonlIngest) {
  const auto r = svc->Handle("POST", "/v1/corpora",
                             "{\"id\":\"1\",\"text\":\"hello world\"}\n{\"id\":\"2\",\"text\":\"bye now\"}\n");
  ASSERT_EQ(r.status, 201) << r.body.dump();
  EXPECT_EQ(r.body["documents"], 2);
  EXPECT_EQ(svc->Handle("POST", "/v1/corpora", "{\"id\":\"1\"}\n").status, 400);
}

}  // namespace
}  // namespace curator
