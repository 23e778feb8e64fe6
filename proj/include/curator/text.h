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

#ifndef CURATOR_TEXT_H_
#define CURATOR_TEXT_H_

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace curator {

// ASCII lowercase; non-ASCII bytes pass through untouched.
std::string ToLower(std::string_view s);

std::string Trim(std::string_view s);

std::vector<std::string> SplitOn(std::string_view s, char sep);

// Lowercased word sequence (letters and digits only), stopwords kept. Used for
// phrase matching against gazetteer surface forms and similarity metrics.
std::vector<std::string> WordSequence(std::string_view text);

// Porter suffix-stripping stemmer, preceded by a comparative/superlative step
// that folds "-ier"/"-iest" onto the "-y" base ("healthier" -> "healthy").
std::string PorterStem(std::string_view word);

// Built-in English stopword list (data/stopwords_en.txt compiled in).
const std::unordered_set<std::string>& DefaultStopwords();

std::unordered_set<std::string> LoadStopwords(const std::string& path);

struct TokenView {
  std::vector<std::string> tokens;     // stemmed, lowercase, no stopwords
  std::vector<std::string> hashtags;   // lowercase, without '#'
  std::vector<std::string> raw_terms;  // surface form for each token
};

// Tokenize, normalize, and strip noise. Lemma lookup (when a lemma table is
// configured) takes precedence over stemming.
class Preprocessor {
 public:
  Preprocessor();
  explicit Preprocessor(std::unordered_set<std::string> stopwords);

  // TSV `form<TAB>lemma`.
  void LoadLemmas(const std::string& path);
  void AddLemma(const std::string& form, const std::string& lemma);

  TokenView Process(std::string_view text) const;

  // Normalizes one already-isolated term (rule arguments, lexicon keys).
  // Returns empty when the term is a stopword or carries no letters.
  std::string NormalizeTerm(std::string_view term) const;

  bool IsStopword(const std::string& lower) const {
    return stopwords_.count(lower) > 0;
  }

 private:
  std::string Stem(const std::string& lower) const;

  std::unordered_set<std::string> stopwords_;
  std::unordered_map<std::string, std::string> lemmas_;
};

}  // namespace curator

#endif  // CURATOR_TEXT_H_
