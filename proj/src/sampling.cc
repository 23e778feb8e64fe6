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

#include "curator/sampling.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "curator/bandit.h"
#include "curator/error.h"

namespace curator {

size_t SampleSize(double rate, size_t n) {
  if (!(rate > 0.0) || rate > 1.0) throw InvalidArgument("sample rate must be in (0, 1]");
  if (n == 0) return 0;
  const double raw = rate * static_cast<double>(n);
  auto size = static_cast<size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<size_t>(size, 1, n);
}

std::vector<size_t> LargestRemainder(const std::vector<size_t>& sizes, size_t total) {
  const size_t n = std::accumulate(sizes.begin(), sizes.end(), size_t{0});
  if (total > n) throw InvalidArgument("allocation exceeds population");
  std::vector<size_t> alloc(sizes.size(), 0);
  if (n == 0 || total == 0) return alloc;
  // Exact integer arithmetic: quota_i = total * size_i / n.
  std::vector<size_t> rem(sizes.size());
  size_t given = 0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const unsigned __int128 num = static_cast<unsigned __int128>(total) * sizes[i];
    alloc[i] = static_cast<size_t>(num / n);
    rem[i] = static_cast<size_t>(num % n);
    given += alloc[i];
  }
  std::vector<size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (rem[a] != rem[b]) return rem[a] > rem[b];
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    return a < b;
  });
  for (size_t k = 0; given < total; ++k) {
    const size_t i = order[k % order.size()];
    if (alloc[i] < sizes[i]) {
      ++alloc[i];
      ++given;
    }
  }
  return alloc;
}

SampleSet StratifiedSample(const std::vector<StratifiedItem>& items, double rate, uint64_t seed,
                           int round) {
  SampleSet out;
  out.round = round;
  const size_t total = SampleSize(rate, items.size());
  if (total == 0) return out;

  std::map<std::string, std::vector<std::string>> strata;
  for (const auto& it : items) strata[it.stratum].push_back(it.item_id);
  std::vector<size_t> sizes;
  for (auto& [label, ids] : strata) {
    std::sort(ids.begin(), ids.end());
    sizes.push_back(ids.size());
  }
  const auto alloc = LargestRemainder(sizes, total);

  size_t s = 0;
  for (auto& [label, ids] : strata) {
    const size_t take = alloc[s++];
    if (take == 0) continue;
    std::mt19937_64 rng(seed ^ StableHash(label));
    // Partial Fisher-Yates with an explicit bounded draw for portability.
    for (size_t i = 0; i < take; ++i) {
      const uint64_t span = ids.size() - i;
      const size_t j = i + static_cast<size_t>(rng() % span);
      std::swap(ids[i], ids[j]);
    }
    std::vector<std::string> chosen(ids.begin(), ids.begin() + static_cast<long>(take));
    std::sort(chosen.begin(), chosen.end());
    for (auto& id : chosen) out.items.push_back({std::move(id), label});
  }
  return out;
}

}  // namespace curator
