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

#ifndef CURATOR_BANDIT_H_
#define CURATOR_BANDIT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace curator {

enum class Verdict { kRelevant, kIrrelevant, kUnknown };

const char* VerdictName(Verdict v);
std::optional<Verdict> ParseVerdict(std::string_view name);

struct RewardCounts {
  uint64_t reward = 0;
  uint64_t demote = 0;
  uint64_t total() const { return reward + demote; }
};

struct RoundDelta {
  int round = 0;
  uint64_t reward = 0;
  uint64_t demote = 0;
};

struct LedgerEntry {
  RewardCounts counts;
  std::vector<RoundDelta> history;  // rounds strictly increasing
};

// A verified item together with the candidate feature keys present in it.
struct ObservedItem {
  std::string item_id;
  Verdict verdict = Verdict::kUnknown;
  std::vector<std::string> features;
};

// Cumulative reward/demote counts per candidate feature (the bandit state).
class FeedbackLedger {
 public:
  explicit FeedbackLedger(double alpha0 = 1.0, double beta0 = 1.0);

  double alpha0() const { return alpha0_; }
  double beta0() const { return beta0_; }

  // Reward every feature present in a Relevant item, demote every feature in
  // an Irrelevant one; Unknown is ignored. Each feature counts once per item.
  // Items outside `sampled` are rejected (NotFound naming the item) before
  // anything is applied. Rounds must not go backwards.
  void Apply(int round, const std::vector<ObservedItem>& items,
             const std::set<std::string>& sampled);

  RewardCounts Counts(std::string_view key) const;
  // Sum of member counts (conceptual features).
  RewardCounts AggregateCounts(const std::vector<std::string>& member_keys) const;

  const std::map<std::string, LedgerEntry, std::less<>>& entries() const { return entries_; }
  int last_round() const { return last_round_; }

  nlohmann::json ToJson() const;
  static FeedbackLedger FromJson(const nlohmann::json& j);

  friend bool operator==(const FeedbackLedger&, const FeedbackLedger&) = default;

 private:
  double alpha0_, beta0_;
  int last_round_ = 0;
  std::map<std::string, LedgerEntry, std::less<>> entries_;
};

bool operator==(const RewardCounts& a, const RewardCounts& b);
bool operator==(const RoundDelta& a, const RoundDelta& b);
bool operator==(const LedgerEntry& a, const LedgerEntry& b);

// (alpha0 + r) / (alpha0 + beta0 + r + d).
double PosteriorMean(uint64_t reward, uint64_t demote, double alpha0 = 1.0, double beta0 = 1.0);

struct Arm {
  std::string key;
  RewardCounts counts;
};

struct ThetaEstimate {
  uint64_t seed = 0;
  std::map<std::string, double> theta;        // in (0, 1)
  std::map<std::string, uint64_t> evidence;   // r + d, for tie-breaking
};

// One seeded Beta(alpha0 + r, beta0 + d) draw per arm. Each arm's stream is
// derived from (seed, key), so a draw does not depend on which other arms are
// present. Parallel over arms.
ThetaEstimate SampleTheta(const std::vector<Arm>& arms, uint64_t seed, double alpha0 = 1.0,
                          double beta0 = 1.0);
ThetaEstimate SampleThetaSerial(const std::vector<Arm>& arms, uint64_t seed,
                                double alpha0 = 1.0, double beta0 = 1.0);
ThetaEstimate SampleTheta(const FeedbackLedger& ledger, uint64_t seed);

// Highest theta first; ties by larger evidence, then key.
std::vector<std::string> TopK(const ThetaEstimate& estimate, size_t k);

// Single Beta draw from an explicit generator state (exposed for tests).
double SampleBeta(double a, double b, uint64_t stream_seed);

uint64_t StableHash(std::string_view s);

}  // namespace curator

#endif  // CURATOR_BANDIT_H_
