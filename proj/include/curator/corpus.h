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

#ifndef CURATOR_CORPUS_H_
#define CURATOR_CORPUS_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "curator/text.h"

namespace curator {

enum class EntityKind { kPerson = 0, kOrganization = 1, kLocation = 2 };
inline constexpr int kNumEntityKinds = 3;

const char* EntityKindName(EntityKind kind);
std::optional<EntityKind> ParseEntityKind(std::string_view name);

struct Document {
  std::string doc_id;
  std::string text;
  std::optional<std::string> created_at;
  std::map<std::string, std::string> meta;
};

// Read-only view of a preprocessed document handed to rule evaluation. All
// lists are sorted and duplicate-free.
struct DocView {
  std::string_view doc_id;
  std::span<const std::string> tokens;    // stemmed
  std::span<const std::string> surfaces;  // lowercase, unstemmed
  std::span<const std::string> hashtags;
  std::array<std::span<const std::string>, kNumEntityKinds> entities;
};

struct Posting {
  uint32_t doc;
  uint32_t tf;
};

struct IndexStats {
  size_t doc_count = 0;
  size_t vocabulary = 0;
  size_t postings = 0;
};

struct IngestResult {
  size_t added = 0;
  size_t unchanged = 0;  // identical records already present
  std::vector<std::string> warnings;
  IndexStats stats;
};

// Owns documents, their preprocessed views, and the inverted index. Ingestion
// is single-writer; after it returns the corpus may be shared for reads.
class Corpus {
 public:
  explicit Corpus(Preprocessor preprocessor = Preprocessor());

  // JSON Lines: {"id": str, "text": str, "created_at"?: str, "meta"?: obj}.
  // A leading {"corpus_header": {...}} line is kept as metadata. The whole
  // stream is validated before anything is committed.
  IngestResult Ingest(std::istream& in);
  IngestResult IngestFile(const std::string& path);
  IngestResult Add(std::vector<Document> docs);

  size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  const Document& doc(size_t i) const { return docs_[i].doc; }
  const TokenView& tokens(size_t i) const { return docs_[i].view; }
  DocView view(size_t i) const;

  std::optional<size_t> Find(std::string_view doc_id) const;
  size_t IndexOf(std::string_view doc_id) const;  // throws NotFound

  const Preprocessor& preprocessor() const { return preprocessor_; }
  const std::string& header() const { return header_; }

  // Index statistics.
  IndexStats stats() const;
  size_t DocumentFrequency(const std::string& term) const;
  uint32_t TermFrequency(const std::string& term, size_t doc) const;
  std::span<const Posting> Postings(const std::string& term) const;
  const std::unordered_map<std::string, std::vector<Posting>>& index() const {
    return index_;
  }

  // tf(term, d) * ln(N / df(term)); 0 when the term is absent.
  double TfIdf(const std::string& term, size_t doc) const;
  double TfIdf(const std::string& term, std::string_view doc_id) const;

  // L2 norm of the document's full tf-idf vector.
  double DocNorm(size_t doc) const;

  // Entity mentions are attached by the knowledge layer after ingestion.
  void SetEntities(size_t doc, EntityKind kind, std::vector<std::string> mentions);

 private:
  struct Stored {
    Document doc;
    TokenView view;
    std::vector<std::string> token_set;
    std::vector<std::string> surface_set;
    std::vector<std::string> hashtag_set;
    std::array<std::vector<std::string>, kNumEntityKinds> entities;
  };

  void Commit(std::vector<Document> docs);
  void ComputeNorms();

  Preprocessor preprocessor_;
  std::vector<Stored> docs_;
  std::unordered_map<std::string, size_t> by_id_;
  std::unordered_map<std::string, std::vector<Posting>> index_;
  std::string header_;
  std::vector<double> norms_;
};

// Ground-truth labels: JSON Lines {id, tag, relevant}.
class LabelSet {
 public:
  static LabelSet Load(const std::string& path);
  static LabelSet Parse(std::istream& in);

  void Set(const std::string& doc_id, const std::string& tag, bool relevant);
  std::optional<bool> Get(std::string_view doc_id, std::string_view tag) const;
  size_t size() const { return labels_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, bool> labels_;
};

}  // namespace curator

#endif  // CURATOR_CORPUS_H_
