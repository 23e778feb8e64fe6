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

#ifndef CURATOR_KNOWLEDGE_H_
#define CURATOR_KNOWLEDGE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "curator/concept.h"
#include "curator/corpus.h"
#include "curator/similarity.h"

namespace curator {

// keyword -> descriptor, from `keyword<TAB>descriptor` lines. Lookups are
// case-insensitive and fall back to the stemmed form of the key.
class Lexicon {
 public:
  static Lexicon Load(const std::string& path);
  static Lexicon Parse(std::istream& in, const std::string& name);

  void Add(const std::string& keyword, const std::string& descriptor);
  std::optional<std::string> Lookup(std::string_view keyword) const;
  // All keywords (as written in the file) mapping to `descriptor`.
  std::vector<std::string> KeywordsFor(std::string_view descriptor) const;
  size_t size() const { return entries_.size(); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;      // lowercase key -> descriptor
  std::unordered_map<std::string, std::string> by_stem_;
  std::map<std::string, std::vector<std::string>> by_descriptor_;  // lowercase
};

struct GazetteerEntry {
  std::string surface;
  EntityKind kind = EntityKind::kPerson;
  std::string descriptor;
};

class Gazetteer {
 public:
  static Gazetteer Load(const std::string& path);
  static Gazetteer Parse(std::istream& in, const std::string& name);

  void Add(GazetteerEntry entry);
  const std::vector<GazetteerEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  const GazetteerEntry* Find(std::string_view surface, EntityKind kind) const;

  // Longest-match scan of a lowercase word sequence; returns the matched
  // entries' lowercase surfaces per kind.
  std::array<std::vector<std::string>, kNumEntityKinds> FindMentions(
      const std::vector<std::string>& words) const;

 private:
  std::vector<GazetteerEntry> entries_;
  std::map<std::pair<std::string, int>, size_t> by_surface_;  // (lower surface, kind)
  std::map<std::string, std::vector<size_t>> by_phrase_;      // word-joined surface
  size_t max_phrase_words_ = 0;
};

class EmbeddingTable {
 public:
  // word2vec text format: header `count D`, then `word v1 ... vD`.
  static EmbeddingTable Load(const std::string& path);
  static EmbeddingTable Parse(std::istream& in, const std::string& name);

  EmbeddingTable() = default;
  explicit EmbeddingTable(size_t dimension) : dimension_(dimension) {}

  void Add(const std::string& word, std::vector<float> vector);
  size_t dimension() const { return dimension_; }
  size_t size() const { return vectors_.size(); }

  // Exact lowercase lookup, then the stemmed form. nullptr when absent.
  const std::vector<float>* Find(std::string_view word) const;

 private:
  size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<float>> vectors_;
  std::unordered_map<std::string, std::string> stem_alias_;
};

double Cosine(const std::vector<float>& a, const std::vector<float>& b);

struct Category {
  std::string name;
  std::vector<std::string> seeds;
  std::vector<float> centroid;
};

class CategoryModel {
 public:
  // JSON: [{"name": ..., "seeds": [...]}, ...] or {"categories": [...]}.
  // Centroids are the mean of in-vocabulary seed vectors.
  static CategoryModel Load(const std::string& path, const EmbeddingTable& table);
  static CategoryModel FromJson(const std::string& json_text, const EmbeddingTable& table);

  const std::vector<Category>& categories() const { return categories_; }
  const Category* Find(std::string_view name) const;

  // Argmax cosine between `vector` and the centroids; ties by name.
  const Category* Nearest(const std::vector<float>& vector) const;

 private:
  std::vector<Category> categories_;
};

struct Annotation {
  std::string attribute;
  std::string descriptor;
  SummaryKind kind = SummaryKind::kKeyword;
};

struct LinkResult {
  GazetteerEntry entry;
  double score = 0.0;
};

// Mean of the listed metrics, maximized over the gazetteer; returned when the
// mean reaches `threshold`. Ties go to the lexicographically smallest surface.
std::optional<LinkResult> LinkEntity(std::string_view mention, const Gazetteer& gazetteer,
                                     const std::vector<SimilarityMetric>& metrics,
                                     double threshold);

struct KnowledgeOptions {
  bool require_hypernyms = false;
  bool require_gazetteer = false;
  bool require_categories = false;
};

// File-backed knowledge layer: loaded once, immutable afterwards. Also serves
// as the fallback concept source for in_group features (hypernym descriptors,
// category names, gazetteer surfaces and descriptors).
class KnowledgeBase : public ConceptSource {
 public:
  KnowledgeBase() = default;

  // Reads hypernyms.tsv, synonyms.tsv, gazetteer.tsv, embeddings.txt and
  // categories.json from `dir` when present. Required-but-missing files and
  // malformed files raise ConfigError / DataError.
  static KnowledgeBase LoadDirectory(const std::string& dir, const KnowledgeOptions& options = {});

  void set_hypernyms(Lexicon l);
  void set_synonyms(Lexicon l) { synonyms_ = std::move(l); }
  void set_gazetteer(Gazetteer g);
  void set_embeddings(EmbeddingTable t) { embeddings_ = std::move(t); }
  void set_categories(CategoryModel m);

  const std::optional<Lexicon>& hypernyms() const { return hypernyms_; }
  const std::optional<Lexicon>& synonyms() const { return synonyms_; }
  const std::optional<Gazetteer>& gazetteer() const { return gazetteer_; }
  const std::optional<EmbeddingTable>& embeddings() const { return embeddings_; }
  const std::optional<CategoryModel>& categories() const { return categories_; }

  bool HasSourceFor(SummaryKind kind) const;

  // topic -> hypernym; category -> nearest category; person / organization /
  // location -> gazetteer descriptor; keyword -> none.
  std::optional<Annotation> AnnotateAttribute(std::string_view attribute,
                                              SummaryKind kind) const;

  // First available annotation in precedence order gazetteer > hypernym >
  // category.
  std::optional<Annotation> Describe(std::string_view attribute) const;

  // Attribute vector: the word's embedding, or the sum over its words.
  std::optional<std::vector<float>> AttributeVector(std::string_view attribute) const;

  const Concept* Resolve(SummaryKind kind, std::string_view label) const override;

  // Attaches gazetteer mentions to every document of the corpus.
  void AttachEntities(Corpus* corpus) const;

 private:
  void RebuildConcepts();

  std::optional<Lexicon> hypernyms_;
  std::optional<Lexicon> synonyms_;
  std::optional<Gazetteer> gazetteer_;
  std::optional<EmbeddingTable> embeddings_;
  std::optional<CategoryModel> categories_;
  std::map<std::pair<SummaryKind, std::string>, Concept> concepts_;
};

}  // namespace curator

#endif  // CURATOR_KNOWLEDGE_H_
