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

#ifndef CURATOR_SAMPLING_H_
#define CURATOR_SAMPLING_H_

#include <cstdint>
#include <string>
#include <vector>

namespace curator {

// max(1, ceil(rate * n)) for n > 0, else 0. Tolerant of binary rounding
// (0.03 * 100 is 3, not 4).
size_t SampleSize(double rate, size_t n);

// Hamilton apportionment of `total` across strata proportionally to `sizes`.
// Remainders are handed out by larger fractional part, then larger stratum,
// then lower index. Allocation never exceeds a stratum's size.
std::vector<size_t> LargestRemainder(const std::vector<size_t>& sizes, size_t total);

struct StratifiedItem {
  std::string item_id;
  std::string stratum;
};

struct SampledItem {
  std::string item_id;
  std::string stratum;
};

struct SampleSet {
  int round = 0;
  std::vector<SampledItem> items;  // strata in label order, ids sorted within
};

// Proportional stratified sample of SampleSize(rate, |items|) items. Strata
// are ordered by label; within a stratum, selection is a seeded shuffle.
SampleSet StratifiedSample(const std::vector<StratifiedItem>& items, double rate, uint64_t seed,
                           int round = 0);

}  // namespace curator

#endif  // CURATOR_SAMPLING_H_
