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

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "curator/text.h"
#include "json.hpp"
#include "test_util.h"

namespace curator {
namespace {

int Cli(const std::string& args, const std::string& log = "/dev/null") {
  const std::string cmd = std::string(CURATOR_CLI) + " " + args + " >" + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new std::string(testing::TempDir("cli"));
    ASSERT_EQ(Cli("synth --docs 4000 --topics 3 --seed 5 --out " + *dir_ + "/data"), 0);
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string RunArgs(const std::string& out) {
    const std::string d = *dir_ + "/data";
    return "run --corpus " + d + "/corpus.jsonl --lexicon " + d + "/lexicon --rule " + d +
           "/seed.rule --labels " + d + "/labels.jsonl --rounds 3 --feedback oracle --seed 7 --out " + out;
  }
  static std::string* dir_;
};
std::string* CliTest::dir_ = nullptr;

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Cli(""), 1);
  EXPECT_EQ(Cli("run --bogus"), 1);
  EXPECT_EQ(Cli("synth --docs -5"), 1);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  EXPECT_EQ(Cli("ingest --corpus /nonexistent/file.jsonl"), 2);
  testing::WriteFile(*dir_ + "/bad.jsonl", "{\"id\":\"1\"}\n");
  EXPECT_EQ(Cli("ingest --corpus " + *dir_ + "/bad.jsonl"), 2);
}

TEST_F(CliTest, SynthIsByteIdentical) {
  ASSERT_EQ(Cli("synth --docs 2000 --seed 9 --out " + *dir_ + "/s1"), 0);
  ASSERT_EQ(Cli("synth --docs 2000 --seed 9 --out " + *dir_ + "/s2"), 0);
  for (const char* f : {"corpus.jsonl", "labels.jsonl", "seed.rule", "lexicon/hypernyms.tsv"}) {
    const std::string a = testing::ReadFile(*dir_ + "/s1/" + f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, testing::ReadFile(*dir_ + "/s2/" + f)) << f;
  }
}

TEST_F(CliTest, RunWritesReportsDeterministically) {
  ASSERT_EQ(Cli(RunArgs(*dir_ + "/run1")), 0);
  ASSERT_EQ(Cli(RunArgs(*dir_ + "/run2")), 0);
  for (int r = 1; r <= 3; ++r) {
    const std::string name = "/round_" + std::to_string(r) + ".json";
    const std::string a = testing::ReadFile(*dir_ + "/run1" + name);
    ASSERT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, testing::ReadFile(*dir_ + "/run2" + name));
    EXPECT_EQ(nlohmann::json::parse(a)["round"], r);
  }
  EXPECT_FALSE(testing::ReadFile(*dir_ + "/run1/final.rule").empty());
  EXPECT_EQ(testing::ReadFile(*dir_ + "/run1/summary.json"),
            testing::ReadFile(*dir_ + "/run2/summary.json"));
}

TEST_F(CliTest, ReportPrintsTable) {
  ASSERT_EQ(Cli(RunArgs(*dir_ + "/run3")), 0);
  const std::string d = *dir_ + "/data";
  ASSERT_EQ(Cli("report --dir " + *dir_ + "/run3 --corpus " + d + "/corpus.jsonl --labels " + d +
                    "/labels.jsonl",
                *dir_ + "/report.txt"),
            0);
  const std::string text = testing::ReadFile(*dir_ + "/report.txt");
  EXPECT_NE(text.find("round"), std::string::npos);
  EXPECT_NE(text.find("KEYM"), std::string::npos);
}

TEST_F(CliTest, RankTopRows) {
  const std::string d = *dir_ + "/data";
  // Members: every keyword of the hypernym lexicon.
  nlohmann::json members = nlohmann::json::array();
  std::istringstream lex(testing::ReadFile(d + "/lexicon/hypernyms.tsv"));
  std::string line;
  while (std::getline(lex, line))
    if (!line.empty()) members.push_back(SplitOn(line, '\t')[0]);
  nlohmann::json pref = {{"concepts", {{{"label", "all"}, {"members", members}}}}};
  testing::WriteFile(*dir_ + "/pref.json", pref.dump());
  ASSERT_EQ(Cli("rank --corpus " + d + "/corpus.jsonl --preference " + *dir_ +
                "/pref.json --top 20 --out " + *dir_ + "/ranked.json"),
            0);
  const auto out = nlohmann::json::parse(testing::ReadFile(*dir_ + "/ranked.json"));
  const auto& items = out.is_array() ? out : out.at("items");
  EXPECT_EQ(items.size(), 20u);
}

}  // namespace
}  // namespace curator
