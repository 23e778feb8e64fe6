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

#ifndef CURATOR_SYNTH_H_
#define CURATOR_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace curator {

// Planted-topic corpus. Documents belong to one of `topics` topics or to the
// background; the tag is topic 0. A seed keyword occurs in tag documents with
// probability `seed_rate_relevant` and elsewhere at the rate that puts the
// seed rule's precision at `seed_precision`. Tag documents carry 1..3 words of
// their topic vocabulary, grouped under hypernym descriptors.
struct SynthParams {
  size_t docs = 50000;
  int topics = 3;
  uint64_t seed = 1;
  double topic_share = 0.25;  // fraction of documents per topic
  size_t vocab_per_topic = 60;
  size_t groups_per_topic = 6;
  size_t filler_vocab = 400;
  size_t filler_min = 6, filler_max = 10;
  double seed_rate_relevant = 0.6;
  double seed_precision = 0.55;
  double noise_rate = 0.05;  // off-topic doc borrows a tag-topic word
  double entity_rate = 0.1;

  void Validate() const;
  nlohmann::json ToJson() const;
};

struct SynthCorpus {
  std::string tag;
  std::string seed_keyword;
  std::string corpus_jsonl;  // header line first
  std::string labels_jsonl;
  std::string hypernyms_tsv;
  std::string gazetteer_tsv;
  std::string seed_rule;  // rule file text
  size_t relevant = 0;
};

SynthCorpus GenerateSynthetic(const SynthParams& params);

// corpus.jsonl, labels.jsonl, seed.rule, lexicon/{hypernyms,gazetteer}.tsv
void WriteSynthetic(const SynthCorpus& corpus, const std::string& dir);

}  // namespace curator

#endif  // CURATOR_SYNTH_H_
