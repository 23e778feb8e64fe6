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

#include "curator/bandit.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "curator/error.h"
#include "curator/text.h"

namespace curator {

using nlohmann::json;

const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kRelevant: return "relevant";
    case Verdict::kIrrelevant: return "irrelevant";
    case Verdict::kUnknown: return "unknown";
  }
  return "?";
}

std::optional<Verdict> ParseVerdict(std::string_view name) {
  const std::string n = ToLower(Trim(name));
  if (n == "relevant" || n == "yes" || n == "r") return Verdict::kRelevant;
  if (n == "irrelevant" || n == "no" || n == "i") return Verdict::kIrrelevant;
  if (n == "unknown" || n == "i don't know" || n == "u") return Verdict::kUnknown;
  return std::nullopt;
}

bool operator==(const RewardCounts& a, const RewardCounts& b) {
  return a.reward == b.reward && a.demote == b.demote;
}
bool operator==(const RoundDelta& a, const RoundDelta& b) {
  return a.round == b.round && a.reward == b.reward && a.demote == b.demote;
}
bool operator==(const LedgerEntry& a, const LedgerEntry& b) {
  return a.counts == b.counts && a.history == b.history;
}

FeedbackLedger::FeedbackLedger(double alpha0, double beta0) : alpha0_(alpha0), beta0_(beta0) {
  if (!(alpha0 > 0) || !(beta0 > 0)) throw InvalidArgument("Beta prior parameters must be > 0");
}

void FeedbackLedger::Apply(int round, const std::vector<ObservedItem>& items,
                           const std::set<std::string>& sampled) {
  if (round < last_round_) {
    throw InvalidArgument("round " + std::to_string(round) + " precedes ledger round " +
                          std::to_string(last_round_));
  }
  for (const auto& item : items) {
    if (!sampled.count(item.item_id)) {
      throw NotFound("verdict for unsampled item: " + item.item_id);
    }
  }
  for (const auto& item : items) {
    if (item.verdict == Verdict::kUnknown) continue;
    std::set<std::string> unique(item.features.begin(), item.features.end());
    for (const auto& key : unique) {
      LedgerEntry& e = entries_[key];
      if (e.history.empty() || e.history.back().round != round) e.history.push_back({round, 0, 0});
      if (item.verdict == Verdict::kRelevant) {
        ++e.counts.reward;
        ++e.history.back().reward;
      } else {
        ++e.counts.demote;
        ++e.history.back().demote;
      }
    }
  }
  last_round_ = round;
}

RewardCounts FeedbackLedger::Counts(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? RewardCounts{} : it->second.counts;
}

RewardCounts FeedbackLedger::AggregateCounts(const std::vector<std::string>& member_keys) const {
  RewardCounts sum;
  for (const auto& k : member_keys) {
    const RewardCounts c = Counts(k);
    sum.reward += c.reward;
    sum.demote += c.demote;
  }
  return sum;
}

json FeedbackLedger::ToJson() const {
  json features = json::array();
  for (const auto& [key, e] : entries_) {
    json history = json::array();
    for (const auto& h : e.history) {
      history.push_back({{"round", h.round}, {"reward", h.reward}, {"demote", h.demote}});
    }
    features.push_back({{"feature", key},
                        {"reward", e.counts.reward},
                        {"demote", e.counts.demote},
                        {"history", history}});
  }
  return {{"alpha0", alpha0_}, {"beta0", beta0_}, {"last_round", last_round_}, {"features", features}};
}

FeedbackLedger FeedbackLedger::FromJson(const json& j) {
  FeedbackLedger l(j.value("alpha0", 1.0), j.value("beta0", 1.0));
  l.last_round_ = j.value("last_round", 0);
  for (const auto& f : j.at("features")) {
    LedgerEntry e;
    e.counts.reward = f.at("reward").get<uint64_t>();
    e.counts.demote = f.at("demote").get<uint64_t>();
    for (const auto& h : f.at("history")) {
      e.history.push_back({h.at("round").get<int>(), h.at("reward").get<uint64_t>(),
                           h.at("demote").get<uint64_t>()});
    }
    l.entries_[f.at("feature").get<std::string>()] = std::move(e);
  }
  return l;
}

double PosteriorMean(uint64_t reward, uint64_t demote, double alpha0, double beta0) {
  return (alpha0 + static_cast<double>(reward)) /
         (alpha0 + beta0 + static_cast<double>(reward) + static_cast<double>(demote));
}

uint64_t StableHash(std::string_view s) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Marsaglia-Tsang gamma sampler on a fixed engine, so draws are identical
// across standard library implementations.
double Uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double StandardNormal(std::mt19937_64& rng) {
  const double u1 = Uniform01(rng), u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double SampleGamma(double shape, std::mt19937_64& rng) {
  if (shape < 1.0) {
    const double u = Uniform01(rng);
    return SampleGamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = StandardNormal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = Uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double SampleBeta(double a, double b, uint64_t stream_seed) {
  std::mt19937_64 rng(SplitMix64(stream_seed));
  const double x = SampleGamma(a, rng);
  const double y = SampleGamma(b, rng);
  double theta = x / (x + y);
  // Keep strictly inside (0, 1).
  theta = std::clamp(theta, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
  return theta;
}

namespace {

double ArmDraw(const Arm& a, uint64_t seed, double alpha0, double beta0) {
  return SampleBeta(alpha0 + static_cast<double>(a.counts.reward),
                    beta0 + static_cast<double>(a.counts.demote), SplitMix64(seed) ^ StableHash(a.key));
}

ThetaEstimate Collect(const std::vector<Arm>& arms, const std::vector<double>& draws, uint64_t seed) {
  ThetaEstimate est;
  est.seed = seed;
  for (size_t i = 0; i < arms.size(); ++i) {
    est.theta[arms[i].key] = draws[i];
    est.evidence[arms[i].key] = arms[i].counts.total();
  }
  return est;
}

}  // namespace

ThetaEstimate SampleTheta(const std::vector<Arm>& arms, uint64_t seed, double alpha0,
                          double beta0) {
  std::vector<double> draws(arms.size());
  const long n = static_cast<long>(arms.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) draws[i] = ArmDraw(arms[i], seed, alpha0, beta0);
  return Collect(arms, draws, seed);
}

ThetaEstimate SampleThetaSerial(const std::vector<Arm>& arms, uint64_t seed, double alpha0,
                                double beta0) {
  std::vector<double> draws;
  draws.reserve(arms.size());
  for (const auto& a : arms) draws.push_back(ArmDraw(a, seed, alpha0, beta0));
  return Collect(arms, draws, seed);
}

ThetaEstimate SampleTheta(const FeedbackLedger& ledger, uint64_t seed) {
  std::vector<Arm> arms;
  arms.reserve(ledger.entries().size());
  for (const auto& [key, e] : ledger.entries()) arms.push_back({key, e.counts});
  return SampleTheta(arms, seed, ledger.alpha0(), ledger.beta0());
}

std::vector<std::string> TopK(const ThetaEstimate& estimate, size_t k) {
  if (k == 0) throw InvalidArgument("top_k requires K >= 1");
  std::vector<std::string> keys;
  keys.reserve(estimate.theta.size());
  for (const auto& [key, theta] : estimate.theta) keys.push_back(key);
  const auto evidence = [&](const std::string& key) {
    auto it = estimate.evidence.find(key);
    return it == estimate.evidence.end() ? uint64_t{0} : it->second;
  };
  const auto better = [&](const std::string& a, const std::string& b) {
    const double ta = estimate.theta.at(a), tb = estimate.theta.at(b);
    if (ta != tb) return ta > tb;
    const uint64_t ea = evidence(a), eb = evidence(b);
    if (ea != eb) return ea > eb;
    return a < b;
  };
  const size_t take = std::min(k, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<long>(take), keys.end(), better);
  keys.resize(take);
  return keys;
}

}  // namespace curator
