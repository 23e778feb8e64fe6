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

#include "curator/knowledge.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "curator/error.h"
#include "curator/text.h"
#include "json.hpp"

namespace curator {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

std::ifstream OpenOrThrow(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + ": " + path);
  return in;
}

}  // namespace

// -- Lexicon -----------------------------------------------------------------

Lexicon Lexicon::Load(const std::string& path) {
  auto in = OpenOrThrow(path, "lexicon");
  return Parse(in, path);
}

Lexicon Lexicon::Parse(std::istream& in, const std::string& name) {
  Lexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty() || line[0] == '#') continue;
    const auto cols = SplitOn(line, '\t');
    if (cols.size() != 2 || Trim(cols[0]).empty() || Trim(cols[1]).empty()) {
      throw DataError(name + ":" + std::to_string(lineno) + ": expected `keyword<TAB>descriptor`");
    }
    lex.Add(Trim(cols[0]), Trim(cols[1]));
  }
  return lex;
}

void Lexicon::Add(const std::string& keyword, const std::string& descriptor) {
  if (Trim(descriptor).empty()) throw DataError("empty descriptor for " + keyword);
  const std::string key = ToLower(keyword);
  entries_[key] = descriptor;
  by_stem_.emplace(PorterStem(key), descriptor);
  by_descriptor_[ToLower(descriptor)].push_back(keyword);
}

std::optional<std::string> Lexicon::Lookup(std::string_view keyword) const {
  const std::string key = ToLower(Trim(keyword));
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  if (auto it = by_stem_.find(key); it != by_stem_.end()) return it->second;
  if (auto it = by_stem_.find(PorterStem(key)); it != by_stem_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::string> Lexicon::KeywordsFor(std::string_view descriptor) const {
  auto it = by_descriptor_.find(ToLower(descriptor));
  if (it == by_descriptor_.end()) return {};
  return it->second;
}

// -- Gazetteer -----------------------------------------------------------------

Gazetteer Gazetteer::Load(const std::string& path) {
  auto in = OpenOrThrow(path, "gazetteer");
  return Parse(in, path);
}

Gazetteer Gazetteer::Parse(std::istream& in, const std::string& name) {
  Gazetteer g;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty() || line[0] == '#') continue;
    const auto cols = SplitOn(line, '\t');
    const std::string where = name + ":" + std::to_string(lineno);
    if (cols.size() != 3) throw DataError(where + ": expected `surface<TAB>kind<TAB>descriptor`");
    auto kind = ParseEntityKind(Trim(cols[1]));
    if (!kind) throw DataError(where + ": unknown entity kind `" + cols[1] + "`");
    if (Trim(cols[0]).empty() || Trim(cols[2]).empty()) {
      throw DataError(where + ": empty surface or descriptor");
    }
    g.Add({Trim(cols[0]), *kind, Trim(cols[2])});
  }
  return g;
}

void Gazetteer::Add(GazetteerEntry entry) {
  const auto key = std::make_pair(ToLower(entry.surface), static_cast<int>(entry.kind));
  if (by_surface_.count(key)) return;  // first definition wins
  const auto words = WordSequence(entry.surface);
  if (words.empty()) throw DataError("gazetteer surface has no words: " + entry.surface);
  const size_t idx = entries_.size();
  by_surface_.emplace(key, idx);
  by_phrase_[JoinWords(words)].push_back(idx);
  max_phrase_words_ = std::max(max_phrase_words_, words.size());
  entries_.push_back(std::move(entry));
}

const GazetteerEntry* Gazetteer::Find(std::string_view surface, EntityKind kind) const {
  auto it = by_surface_.find({ToLower(Trim(surface)), static_cast<int>(kind)});
  return it == by_surface_.end() ? nullptr : &entries_[it->second];
}

std::array<std::vector<std::string>, kNumEntityKinds> Gazetteer::FindMentions(
    const std::vector<std::string>& words) const {
  std::array<std::vector<std::string>, kNumEntityKinds> out;
  size_t i = 0;
  while (i < words.size()) {
    size_t matched = 0;
    for (size_t len = std::min(max_phrase_words_, words.size() - i); len >= 1; --len) {
      std::vector<std::string> span(words.begin() + i, words.begin() + i + len);
      auto it = by_phrase_.find(JoinWords(span));
      if (it == by_phrase_.end()) continue;
      for (size_t idx : it->second) {
        out[static_cast<int>(entries_[idx].kind)].push_back(ToLower(entries_[idx].surface));
      }
      matched = len;
      break;
    }
    i += matched ? matched : 1;
  }
  return out;
}

// -- Embeddings ----------------------------------------------------------------

EmbeddingTable EmbeddingTable::Load(const std::string& path) {
  auto in = OpenOrThrow(path, "embedding table");
  return Parse(in, path);
}

EmbeddingTable EmbeddingTable::Parse(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(name + ": missing header `count D`");
  std::istringstream header(line);
  size_t count = 0, dim = 0;
  if (!(header >> count >> dim) || dim == 0) {
    throw DataError(name + ":1: header must be `count D`");
  }
  EmbeddingTable table(dim);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    std::istringstream row(line);
    std::string word;
    row >> word;
    std::vector<float> v;
    v.reserve(dim);
    float x;
    while (row >> x) v.push_back(x);
    if (v.size() != dim) {
      throw DataError(name + ":" + std::to_string(lineno) + ": vector has " +
                      std::to_string(v.size()) + " components, header says " +
                      std::to_string(dim));
    }
    table.Add(word, std::move(v));
  }
  if (table.size() != count) {
    throw DataError(name + ": header declares " + std::to_string(count) + " vectors, found " +
                    std::to_string(table.size()));
  }
  return table;
}

void EmbeddingTable::Add(const std::string& word, std::vector<float> vector) {
  if (vector.size() != dimension_) {
    throw DataError("embedding for `" + word + "` has dimension " +
                    std::to_string(vector.size()) + ", expected " + std::to_string(dimension_));
  }
  for (float x : vector) {
    if (!std::isfinite(x)) throw DataError("non-finite embedding component for " + word);
  }
  const std::string key = ToLower(word);
  stem_alias_.emplace(PorterStem(key), key);
  vectors_[key] = std::move(vector);
}

const std::vector<float>* EmbeddingTable::Find(std::string_view word) const {
  const std::string key = ToLower(Trim(word));
  if (auto it = vectors_.find(key); it != vectors_.end()) return &it->second;
  auto alias = stem_alias_.find(key);
  if (alias == stem_alias_.end()) alias = stem_alias_.find(PorterStem(key));
  if (alias != stem_alias_.end()) return &vectors_.at(alias->second);
  return nullptr;
}

double Cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// -- Categories ----------------------------------------------------------------

CategoryModel CategoryModel::Load(const std::string& path, const EmbeddingTable& table) {
  auto in = OpenOrThrow(path, "category model");
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str(), table);
}

CategoryModel CategoryModel::FromJson(const std::string& json_text, const EmbeddingTable& table) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw DataError("category model is not valid JSON");
  if (doc.is_object() && doc.contains("categories")) doc = doc["categories"];
  if (!doc.is_array()) throw DataError("category model must be an array of {name, seeds}");
  CategoryModel model;
  for (const auto& c : doc) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string() || !c.contains("seeds") ||
        !c["seeds"].is_array()) {
      throw DataError("category entries need `name` and `seeds`");
    }
    Category cat;
    cat.name = c["name"].get<std::string>();
    cat.centroid.assign(table.dimension(), 0.0f);
    size_t used = 0;
    for (const auto& s : c["seeds"]) {
      if (!s.is_string()) throw DataError("category seeds must be strings: " + cat.name);
      cat.seeds.push_back(s.get<std::string>());
      if (const auto* v = table.Find(cat.seeds.back())) {
        for (size_t i = 0; i < v->size(); ++i) cat.centroid[i] += (*v)[i];
        ++used;
      }
    }
    if (used == 0) {
      throw ConfigError("category `" + cat.name + "` has no seed in the embedding table");
    }
    for (float& x : cat.centroid) x /= static_cast<float>(used);
    model.categories_.push_back(std::move(cat));
  }
  return model;
}

const Category* CategoryModel::Find(std::string_view name) const {
  const std::string n = ToLower(name);
  for (const auto& c : categories_) {
    if (ToLower(c.name) == n) return &c;
  }
  return nullptr;
}

const Category* CategoryModel::Nearest(const std::vector<float>& vector) const {
  const Category* best = nullptr;
  double best_score = -2.0;
  for (const auto& c : categories_) {
    const double s = Cosine(vector, c.centroid);
    if (s > best_score || (s == best_score && best && c.name < best->name)) {
      best = &c;
      best_score = s;
    }
  }
  return best;
}

// -- Linking -------------------------------------------------------------------

std::optional<LinkResult> LinkEntity(std::string_view mention, const Gazetteer& gazetteer,
                                     const std::vector<SimilarityMetric>& metrics,
                                     double threshold) {
  if (metrics.empty()) throw InvalidArgument("link_entity needs at least one metric");
  if (threshold < 0.0 || threshold > 1.0) throw InvalidArgument("threshold must be in [0,1]");
  if (gazetteer.empty()) throw InvalidArgument("gazetteer is empty");

  IdfTable idf;
  {
    std::map<std::string, size_t> df;
    for (const auto& e : gazetteer.entries()) {
      auto words = WordSequence(e.surface);
      std::sort(words.begin(), words.end());
      words.erase(std::unique(words.begin(), words.end()), words.end());
      for (const auto& w : words) ++df[w];
    }
    const double n = static_cast<double>(gazetteer.entries().size());
    for (const auto& [w, d] : df) idf[w] = std::log(1.0 + n / static_cast<double>(d));
  }

  std::optional<LinkResult> best;
  for (const auto& e : gazetteer.entries()) {
    double sum = 0;
    for (auto m : metrics) sum += StringSimilarity(mention, e.surface, m, &idf);
    const double mean = sum / static_cast<double>(metrics.size());
    if (!best || mean > best->score ||
        (mean == best->score && e.surface < best->entry.surface)) {
      best = LinkResult{e, mean};
    }
  }
  if (!best || best->score < threshold) return std::nullopt;
  return best;
}

// -- KnowledgeBase ---------------------------------------------------------------

KnowledgeBase KnowledgeBase::LoadDirectory(const std::string& dir, const KnowledgeOptions& options) {
  if (!fs::is_directory(dir)) throw ConfigError("lexicon directory not found: " + dir);
  const auto path = [&](const char* f) { return (fs::path(dir) / f).string(); };
  const auto exists = [&](const char* f) { return fs::exists(path(f)); };

  KnowledgeBase kb;
  if (exists("hypernyms.tsv")) {
    kb.set_hypernyms(Lexicon::Load(path("hypernyms.tsv")));
  } else if (options.require_hypernyms) {
    throw ConfigError("missing lexicon file: " + path("hypernyms.tsv"));
  }
  if (exists("synonyms.tsv")) kb.set_synonyms(Lexicon::Load(path("synonyms.tsv")));
  if (exists("gazetteer.tsv")) {
    kb.set_gazetteer(Gazetteer::Load(path("gazetteer.tsv")));
  } else if (options.require_gazetteer) {
    throw ConfigError("missing lexicon file: " + path("gazetteer.tsv"));
  }
  if (exists("embeddings.txt")) kb.set_embeddings(EmbeddingTable::Load(path("embeddings.txt")));
  if (exists("categories.json")) {
    if (!kb.embeddings_) {
      throw ConfigError("categories.json needs embeddings.txt to compute centroids");
    }
    kb.set_categories(CategoryModel::Load(path("categories.json"), *kb.embeddings_));
  } else if (options.require_categories) {
    throw ConfigError("missing lexicon file: " + path("categories.json"));
  }
  return kb;
}

void KnowledgeBase::set_hypernyms(Lexicon l) {
  hypernyms_ = std::move(l);
  RebuildConcepts();
}

void KnowledgeBase::set_gazetteer(Gazetteer g) {
  gazetteer_ = std::move(g);
  RebuildConcepts();
}

void KnowledgeBase::set_categories(CategoryModel m) {
  categories_ = std::move(m);
  RebuildConcepts();
}

bool KnowledgeBase::HasSourceFor(SummaryKind kind) const {
  switch (kind) {
    case SummaryKind::kTopic: return hypernyms_.has_value();
    case SummaryKind::kCategory: return categories_.has_value() && embeddings_.has_value();
    case SummaryKind::kPerson:
    case SummaryKind::kOrganization:
    case SummaryKind::kLocation: return gazetteer_.has_value();
    case SummaryKind::kKeyword: return true;
  }
  return false;
}

std::optional<std::vector<float>> KnowledgeBase::AttributeVector(std::string_view attribute) const {
  if (!embeddings_) return std::nullopt;
  if (const auto* v = embeddings_->Find(attribute)) return *v;
  const auto words = WordSequence(attribute);
  if (words.size() < 2) return std::nullopt;
  std::vector<float> sum(embeddings_->dimension(), 0.0f);
  bool any = false;
  for (const auto& w : words) {
    if (const auto* v = embeddings_->Find(w)) {
      for (size_t i = 0; i < v->size(); ++i) sum[i] += (*v)[i];
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return sum;
}

std::optional<Annotation> KnowledgeBase::AnnotateAttribute(std::string_view attribute,
                                                           SummaryKind kind) const {
  const std::string attr = Trim(attribute);
  if (attr.empty()) return std::nullopt;
  switch (kind) {
    case SummaryKind::kTopic: {
      if (!hypernyms_) return std::nullopt;
      auto d = hypernyms_->Lookup(attr);
      if (!d) return std::nullopt;
      return Annotation{attr, *d, kind};
    }
    case SummaryKind::kCategory: {
      if (!categories_) return std::nullopt;
      auto v = AttributeVector(attr);
      if (!v) return std::nullopt;
      const Category* c = categories_->Nearest(*v);
      if (!c) return std::nullopt;
      return Annotation{attr, c->name, kind};
    }
    case SummaryKind::kPerson:
    case SummaryKind::kOrganization:
    case SummaryKind::kLocation: {
      if (!gazetteer_) return std::nullopt;
      const EntityKind ek = kind == SummaryKind::kPerson ? EntityKind::kPerson
                            : kind == SummaryKind::kOrganization ? EntityKind::kOrganization
                                                                 : EntityKind::kLocation;
      const GazetteerEntry* e = gazetteer_->Find(attr, ek);
      if (!e) return std::nullopt;
      return Annotation{attr, e->descriptor, kind};
    }
    case SummaryKind::kKeyword:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Annotation> KnowledgeBase::Describe(std::string_view attribute) const {
  for (auto k : {SummaryKind::kPerson, SummaryKind::kOrganization, SummaryKind::kLocation,
                 SummaryKind::kTopic, SummaryKind::kCategory}) {
    if (auto a = AnnotateAttribute(attribute, k)) return a;
  }
  return std::nullopt;
}

void KnowledgeBase::RebuildConcepts() {
  concepts_.clear();
  const auto add = [&](SummaryKind kind, const std::string& label,
                       const std::vector<std::string>& members) {
    auto& c = concepts_[{kind, ToLower(label)}];
    if (c.label.empty()) {
      c.label = label;
      c.kind = kind;
    }
    for (const auto& m : members) {
      if (std::find(c.members.begin(), c.members.end(), m) == c.members.end()) {
        c.members.push_back(m);
      }
    }
  };
  if (hypernyms_) {
    for (const auto& [key, descriptor] : hypernyms_->entries()) add(SummaryKind::kTopic, descriptor, {key});
  }
  if (categories_) {
    for (const auto& c : categories_->categories()) add(SummaryKind::kCategory, c.name, c.seeds);
  }
  if (gazetteer_) {
    for (const auto& e : gazetteer_->entries()) {
      const SummaryKind kind = e.kind == EntityKind::kPerson ? SummaryKind::kPerson
                               : e.kind == EntityKind::kOrganization ? SummaryKind::kOrganization
                                                                     : SummaryKind::kLocation;
      add(kind, e.surface, {e.surface});
      if (ToLower(e.descriptor) != ToLower(e.surface)) add(kind, e.descriptor, {e.surface});
    }
  }
}

const Concept* KnowledgeBase::Resolve(SummaryKind kind, std::string_view label) const {
  auto it = concepts_.find({kind, ToLower(Trim(label))});
  return it == concepts_.end() ? nullptr : &it->second;
}

void KnowledgeBase::AttachEntities(Corpus* corpus) const {
  if (!gazetteer_) return;
  for (size_t i = 0; i < corpus->size(); ++i) {
    auto mentions = gazetteer_->FindMentions(WordSequence(corpus->doc(i).text));
    for (int k = 0; k < kNumEntityKinds; ++k) {
      corpus->SetEntities(i, static_cast<EntityKind>(k), std::move(mentions[k]));
    }
  }
}

}  // namespace curator
