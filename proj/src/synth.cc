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

#include "curator/synth.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "curator/error.h"
#include "curator/text.h"

namespace curator {

using nlohmann::json;

void SynthParams::Validate() const {
  if (docs == 0) throw InvalidArgument("synth: docs must be >= 1");
  if (topics < 1) throw InvalidArgument("synth: topics must be >= 1");
  if (!(topic_share > 0.0) || topic_share * topics > 1.0) {
    throw InvalidArgument("synth: topic_share * topics must be in (0, 1]");
  }
  if (groups_per_topic == 0 || vocab_per_topic < groups_per_topic) {
    throw InvalidArgument("synth: need vocab_per_topic >= groups_per_topic >= 1");
  }
  if (filler_min > filler_max || filler_max > filler_vocab) {
    throw InvalidArgument("synth: bad filler range");
  }
  if (!(seed_precision > 0.0 && seed_precision < 1.0)) {
    throw InvalidArgument("synth: seed_precision must be in (0, 1)");
  }
  if (!(seed_rate_relevant > 0.0 && seed_rate_relevant <= 1.0)) {
    throw InvalidArgument("synth: seed_rate_relevant must be in (0, 1]");
  }
}

json SynthParams::ToJson() const {
  return {{"generator", "curator-synth"},
          {"docs", docs},
          {"topics", topics},
          {"seed", seed},
          {"topic_share", topic_share},
          {"vocab_per_topic", vocab_per_topic},
          {"groups_per_topic", groups_per_topic},
          {"filler_vocab", filler_vocab},
          {"filler_min", filler_min},
          {"filler_max", filler_max},
          {"seed_rate_relevant", seed_rate_relevant},
          {"seed_precision", seed_precision},
          {"noise_rate", noise_rate},
          {"entity_rate", entity_rate}};
}

namespace {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double Uniform() { return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0); }
  size_t Below(size_t n) { return static_cast<size_t>(eng_() % n); }
  bool Chance(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

// Pronounceable words ending in 'a' or 'o'; the stemmer leaves them intact.
class WordMaker {
 public:
  explicit WordMaker(Rng* rng) : rng_(rng) {}

  std::string Make() {
    static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
                                    "s", "t", "v", "z", "br", "dr", "gr", "kr", "pl", "tr"};
    static const char* kVowels[] = {"a", "e", "i", "o", "u"};
    static const char* kEnds[] = {"a", "o"};
    while (true) {
      const size_t syll = 2 + rng_->Below(2);
      std::string w;
      for (size_t i = 0; i < syll; ++i) {
        w += kOnsets[rng_->Below(std::size(kOnsets))];
        w += i + 1 == syll ? kEnds[rng_->Below(2)] : kVowels[rng_->Below(std::size(kVowels))];
      }
      if (DefaultStopwords().count(w) || PorterStem(w) != w) continue;
      if (used_.insert(w).second) return w;
    }
  }

 private:
  Rng* rng_;
  std::set<std::string> used_;
};

std::string Capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string Timestamp(size_t i) {
  char buf[32];
  const size_t minutes = i % (28 * 24 * 60);
  std::snprintf(buf, sizeof buf, "2019-02-%02zuT%02zu:%02zu:00Z", 1 + minutes / (24 * 60),
                (minutes / 60) % 24, minutes % 60);
  return buf;
}

}  // namespace

SynthCorpus GenerateSynthetic(const SynthParams& p) {
  p.Validate();
  Rng rng(p.seed);
  WordMaker words(&rng);

  // Vocabularies.
  std::vector<std::string> topic_names;
  std::vector<std::vector<std::string>> vocab(p.topics), group_of(p.topics);
  std::vector<std::vector<std::string>> group_names(p.topics);
  SynthCorpus out;
  for (int t = 0; t < p.topics; ++t) {
    topic_names.push_back(words.Make());
    for (size_t g = 0; g < p.groups_per_topic; ++g) group_names[t].push_back(words.Make());
    for (size_t w = 0; w < p.vocab_per_topic; ++w) {
      vocab[t].push_back(words.Make());
      group_of[t].push_back(group_names[t][w % p.groups_per_topic]);
      out.hypernyms_tsv += vocab[t].back() + "\t" + group_of[t].back() + "\n";
    }
  }
  std::vector<std::string> filler;
  for (size_t i = 0; i < p.filler_vocab; ++i) filler.push_back(words.Make());
  const std::string seed_word = words.Make();

  // Entities: two people, one organization, one place per topic.
  struct Ent {
    std::string surface;
    int topic;
  };
  std::vector<Ent> ents;
  std::vector<std::string> regions;
  for (int r = 0; r < 2; ++r) regions.push_back(words.Make());
  for (int t = 0; t < p.topics; ++t) {
    for (int k = 0; k < 2; ++k) {
      const std::string s = Capitalize(words.Make()) + " " + Capitalize(words.Make());
      out.gazetteer_tsv += s + "\tperson\t" + topic_names[t] + " official\n";
      ents.push_back({s, t});
    }
    const std::string org = Capitalize(words.Make()) + " " + Capitalize(topic_names[t]) + " Council";
    out.gazetteer_tsv += org + "\torganization\t" + topic_names[t] + " council\n";
    ents.push_back({org, t});
    const std::string loc = Capitalize(words.Make());
    out.gazetteer_tsv += loc + "\tlocation\ttown in " + regions[t % regions.size()] + "\n";
    ents.push_back({loc, t});
  }

  // Seed keyword rate outside the tag topic that yields the target precision.
  const double rel_share = p.topic_share;
  const double q = std::min(1.0, p.seed_rate_relevant * rel_share * (1.0 - p.seed_precision) /
                                     (p.seed_precision * (1.0 - rel_share)));

  out.tag = topic_names[0];
  out.seed_keyword = seed_word;
  json header = p.ToJson();
  header["tag"] = out.tag;
  header["seed_keyword"] = seed_word;
  header["seed_rate_other"] = q;
  out.corpus_jsonl = json{{"corpus_header", header}}.dump() + "\n";

  std::vector<std::string> bag;
  for (size_t i = 0; i < p.docs; ++i) {
    const double u = rng.Uniform();
    const int topic = u < p.topic_share * p.topics ? static_cast<int>(u / p.topic_share) : -1;
    bag.clear();
    if (topic >= 0) {
      const size_t n = 1 + rng.Below(3);
      for (size_t k = 0; k < n; ++k) bag.push_back(vocab[topic][rng.Below(vocab[topic].size())]);
    }
    if (topic == 0) {
      if (rng.Chance(p.seed_rate_relevant)) bag.push_back(seed_word);
    } else {
      if (rng.Chance(q)) bag.push_back(seed_word);
      if (rng.Chance(p.noise_rate)) bag.push_back(vocab[0][rng.Below(vocab[0].size())]);
    }
    const size_t nf = p.filler_min + rng.Below(p.filler_max - p.filler_min + 1);
    for (size_t k = 0; k < nf; ++k) bag.push_back(filler[rng.Below(filler.size())]);
    for (size_t k = bag.size(); k > 1; --k) std::swap(bag[k - 1], bag[rng.Below(k)]);
    std::string text;
    for (const auto& w : bag) text += (text.empty() ? "" : " ") + w;
    if (topic >= 0 && rng.Chance(p.entity_rate)) {
      std::vector<const Ent*> mine;
      for (const auto& e : ents) {
        if (e.topic == topic) mine.push_back(&e);
      }
      text += " " + mine[rng.Below(mine.size())]->surface;
    }
    char id[32];
    std::snprintf(id, sizeof id, "d%07zu", i + 1);
    out.corpus_jsonl +=
        json{{"id", id}, {"text", text}, {"created_at", Timestamp(i)}}.dump() + "\n";
    out.labels_jsonl += json{{"id", id}, {"tag", out.tag}, {"relevant", topic == 0}}.dump() + "\n";
    if (topic == 0) ++out.relevant;
  }
  out.seed_rule = "tag: " + out.tag + "\nTweet.Keyword.Contains('" + seed_word + "')\n";
  return out;
}

void WriteSynthetic(const SynthCorpus& c, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "lexicon", ec);
  if (ec) throw Unavailable("cannot create " + dir + ": " + ec.message());
  const auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Unavailable("cannot write " + path.string());
    out << text;
  };
  write(fs::path(dir) / "corpus.jsonl", c.corpus_jsonl);
  write(fs::path(dir) / "labels.jsonl", c.labels_jsonl);
  write(fs::path(dir) / "seed.rule", c.seed_rule);
  write(fs::path(dir) / "lexicon" / "hypernyms.tsv", c.hypernyms_tsv);
  write(fs::path(dir) / "lexicon" / "gazetteer.tsv", c.gazetteer_tsv);
}

}  // namespace curator
