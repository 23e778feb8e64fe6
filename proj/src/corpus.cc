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

#include "curator/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <regex>
#include <unordered_set>

#include "curator/error.h"
#include "json.hpp"

namespace curator {

using nlohmann::json;

namespace {

std::vector<std::string> SortedUnique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool LooksLikeRfc3339(const std::string& s) {
  static const std::regex kPattern(
      R"(^\d{4}-\d{2}-\d{2}[Tt ]\d{2}:\d{2}:\d{2}(\.\d+)?([Zz]|[+-]\d{2}:\d{2})$)");
  return std::regex_match(s, kPattern);
}

std::string LineError(size_t lineno, const std::string& what) {
  return "line " + std::to_string(lineno) + ": " + what;
}

Document ParseRecord(const std::string& line, size_t lineno) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(LineError(lineno, std::string("malformed JSON: ") + e.what()));
  }
  if (!rec.is_object()) throw DataError(LineError(lineno, "record is not an object"));
  if (!rec.contains("id") || !rec["id"].is_string()) {
    throw DataError(LineError(lineno, "missing string field `id`"));
  }
  if (!rec.contains("text") || !rec["text"].is_string()) {
    throw DataError(LineError(lineno, "missing string field `text`"));
  }
  Document doc;
  doc.doc_id = rec["id"].get<std::string>();
  doc.text = rec["text"].get<std::string>();
  if (doc.doc_id.empty()) throw DataError(LineError(lineno, "empty `id`"));
  if (Trim(doc.text).empty()) throw DataError(LineError(lineno, "empty `text`"));
  if (rec.contains("created_at") && !rec["created_at"].is_null()) {
    if (!rec["created_at"].is_string() ||
        !LooksLikeRfc3339(rec["created_at"].get<std::string>())) {
      throw DataError(LineError(lineno, "`created_at` is not an RFC 3339 timestamp"));
    }
    doc.created_at = rec["created_at"].get<std::string>();
  }
  if (rec.contains("meta") && !rec["meta"].is_null()) {
    if (!rec["meta"].is_object()) {
      throw DataError(LineError(lineno, "`meta` must be an object"));
    }
    for (const auto& [k, v] : rec["meta"].items()) {
      doc.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return doc;
}

bool SameRecord(const Document& a, const Document& b) {
  return a.text == b.text && a.created_at == b.created_at && a.meta == b.meta;
}

}  // namespace

const char* EntityKindName(EntityKind kind) {
  switch (kind) {
    case EntityKind::kPerson: return "person";
    case EntityKind::kOrganization: return "organization";
    case EntityKind::kLocation: return "location";
  }
  return "?";
}

std::optional<EntityKind> ParseEntityKind(std::string_view name) {
  const std::string n = ToLower(name);
  if (n == "person") return EntityKind::kPerson;
  if (n == "organization" || n == "org") return EntityKind::kOrganization;
  if (n == "location") return EntityKind::kLocation;
  return std::nullopt;
}

Corpus::Corpus(Preprocessor preprocessor)
    : preprocessor_(std::move(preprocessor)) {}

IngestResult Corpus::Ingest(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  size_t lineno = 0;
  std::string header;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    if (docs.empty() && header.empty() && line.find("\"corpus_header\"") != std::string::npos) {
      json h = json::parse(line, nullptr, false);
      if (h.is_object() && h.contains("corpus_header")) {
        header = h["corpus_header"].dump();
        continue;
      }
    }
    docs.push_back(ParseRecord(line, lineno));
  }
  IngestResult result = Add(std::move(docs));
  if (!header.empty()) header_ = header;
  return result;
}

IngestResult Corpus::IngestFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file: " + path);
  return Ingest(in);
}

IngestResult Corpus::Add(std::vector<Document> docs) {
  IngestResult result;
  std::vector<Document> fresh;
  std::unordered_map<std::string, size_t> seen;
  for (auto& d : docs) {
    if (Trim(d.text).empty()) throw DataError("document " + d.doc_id + " has empty text");
    if (auto it = by_id_.find(d.doc_id); it != by_id_.end()) {
      if (!SameRecord(docs_[it->second].doc, d)) {
        throw Conflict("duplicate document id with different content: " + d.doc_id);
      }
      ++result.unchanged;
      continue;
    }
    if (auto it = seen.find(d.doc_id); it != seen.end()) {
      if (!SameRecord(fresh[it->second], d)) {
        throw Conflict("duplicate document id with different content: " + d.doc_id);
      }
      ++result.unchanged;
      continue;
    }
    seen.emplace(d.doc_id, fresh.size());
    fresh.push_back(std::move(d));
  }
  if (result.unchanged > 0) {
    result.warnings.push_back(std::to_string(result.unchanged) +
                              " record(s) already present; skipped");
  }
  result.added = fresh.size();
  if (!fresh.empty()) Commit(std::move(fresh));
  result.stats = stats();
  return result;
}

void Corpus::Commit(std::vector<Document> docs) {
  docs_.reserve(docs_.size() + docs.size());
  for (auto& d : docs) {
    Stored s;
    s.view = preprocessor_.Process(d.text);
    s.token_set = SortedUnique(s.view.tokens);
    std::vector<std::string> surfaces;
    surfaces.reserve(s.view.raw_terms.size());
    for (const auto& r : s.view.raw_terms) surfaces.push_back(ToLower(r));
    s.surface_set = SortedUnique(std::move(surfaces));
    std::vector<std::string> tags = s.view.hashtags;
    if (auto it = d.meta.find("hashtags"); it != d.meta.end()) {
      json h = json::parse(it->second, nullptr, false);
      if (h.is_array()) {
        for (const auto& t : h) {
          if (t.is_string()) {
            std::string tag = ToLower(t.get<std::string>());
            if (!tag.empty() && tag[0] == '#') tag.erase(0, 1);
            if (!tag.empty()) tags.push_back(tag);
          }
        }
      }
    }
    s.hashtag_set = SortedUnique(std::move(tags));

    const uint32_t idx = static_cast<uint32_t>(docs_.size());
    std::unordered_map<std::string, uint32_t> tf;
    for (const auto& t : s.view.tokens) ++tf[t];
    for (const auto& [term, count] : tf) index_[term].push_back({idx, count});

    by_id_.emplace(d.doc_id, docs_.size());
    s.doc = std::move(d);
    docs_.push_back(std::move(s));
  }
  ComputeNorms();
}

void Corpus::ComputeNorms() {
  norms_.assign(docs_.size(), 0.0);
  const double n = static_cast<double>(docs_.size());
  for (const auto& [term, postings] : index_) {
    const double idf = std::log(n / static_cast<double>(postings.size()));
    for (const auto& p : postings) {
      const double w = p.tf * idf;
      norms_[p.doc] += w * w;
    }
  }
  for (double& v : norms_) v = std::sqrt(v);
}

DocView Corpus::view(size_t i) const {
  const Stored& s = docs_[i];
  DocView v;
  v.doc_id = s.doc.doc_id;
  v.tokens = s.token_set;
  v.surfaces = s.surface_set;
  v.hashtags = s.hashtag_set;
  for (int k = 0; k < kNumEntityKinds; ++k) v.entities[k] = s.entities[k];
  return v;
}

std::optional<size_t> Corpus::Find(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

size_t Corpus::IndexOf(std::string_view doc_id) const {
  auto idx = Find(doc_id);
  if (!idx) throw NotFound("unknown document id: " + std::string(doc_id));
  return *idx;
}

IndexStats Corpus::stats() const {
  IndexStats s;
  s.doc_count = docs_.size();
  s.vocabulary = index_.size();
  for (const auto& [term, postings] : index_) s.postings += postings.size();
  return s;
}

size_t Corpus::DocumentFrequency(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? 0 : it->second.size();
}

std::span<const Posting> Corpus::Postings(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return {};
  return it->second;
}

uint32_t Corpus::TermFrequency(const std::string& term, size_t doc) const {
  // Postings are appended in document order, so they are sorted by doc.
  const auto postings = Postings(term);
  auto it = std::lower_bound(postings.begin(), postings.end(), doc,
                             [](const Posting& p, size_t d) { return p.doc < d; });
  if (it == postings.end() || it->doc != doc) return 0;
  return it->tf;
}

double Corpus::TfIdf(const std::string& term, size_t doc) const {
  const size_t df = DocumentFrequency(term);
  if (df == 0) return 0.0;
  const uint32_t tf = TermFrequency(term, doc);
  if (tf == 0) return 0.0;
  return tf * std::log(static_cast<double>(docs_.size()) / static_cast<double>(df));
}

double Corpus::TfIdf(const std::string& term, std::string_view doc_id) const {
  return TfIdf(term, IndexOf(doc_id));
}

double Corpus::DocNorm(size_t doc) const { return norms_.at(doc); }

void Corpus::SetEntities(size_t doc, EntityKind kind, std::vector<std::string> mentions) {
  docs_.at(doc).entities[static_cast<int>(kind)] = SortedUnique(std::move(mentions));
}

// -- LabelSet ----------------------------------------------------------------

LabelSet LabelSet::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open labels file: " + path);
  return Parse(in);
}

LabelSet LabelSet::Parse(std::istream& in) {
  LabelSet set;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("id") ||
        !rec.contains("tag") || !rec.contains("relevant") || !rec["id"].is_string() ||
        !rec["tag"].is_string() || !rec["relevant"].is_boolean()) {
      throw DataError(LineError(lineno, "expected {id, tag, relevant}"));
    }
    set.Set(rec["id"], rec["tag"], rec["relevant"].get<bool>());
  }
  return set;
}

void LabelSet::Set(const std::string& doc_id, const std::string& tag, bool relevant) {
  labels_[{doc_id, tag}] = relevant;
}

std::optional<bool> LabelSet::Get(std::string_view doc_id, std::string_view tag) const {
  auto it = labels_.find({std::string(doc_id), std::string(tag)});
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

}  // namespace curator
