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

#include "curator/summarize.h"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "curator/text.h"

namespace curator {

std::vector<FeatureGroup> SummarizeFeatures(const std::vector<std::string>& attributes,
                                            const DescriptorMapper& mapper) {
  // Abstract[t] for each distinct attribute.
  std::vector<std::string> distinct;
  std::unordered_map<std::string, std::optional<std::string>> abstract;
  for (const auto& t : attributes) {
    if (abstract.count(t)) continue;
    abstract.emplace(t, mapper(t));
    distinct.push_back(t);
  }

  // set_map: distinct descriptors in first-appearance order.
  std::vector<std::string> set_map;
  std::unordered_set<std::string> seen;
  for (const auto& t : distinct) {
    const auto& d = abstract.at(t);
    if (d && seen.insert(*d).second) set_map.push_back(*d);
  }

  std::vector<FeatureGroup> out;
  out.reserve(set_map.size());
  for (const auto& descriptor : set_map) {
    FeatureGroup g{descriptor, {}, true};
    for (const auto& t : distinct) {
      if (abstract.at(t) == descriptor) g.members.push_back(t);
    }
    out.push_back(std::move(g));
  }
  for (const auto& t : distinct) {
    if (!abstract.at(t)) out.push_back({t, {t}, false});
  }
  return out;
}

std::optional<std::vector<float>> EmbedAnnotation(const Annotation& annotation,
                                                  const EmbeddingTable& table,
                                                  const Preprocessor& pre) {
  std::vector<float> sum(table.dimension(), 0.0f);
  bool any = false;
  for (const auto& w : WordSequence(annotation.descriptor)) {
    if (pre.IsStopword(w)) continue;
    const auto* v = table.Find(w);
    if (!v) continue;
    for (size_t i = 0; i < v->size(); ++i) sum[i] += (*v)[i];
    any = true;
  }
  if (!any) return std::nullopt;
  return sum;
}

std::vector<Concept> GroupByEmbedding(std::vector<WeightedAttribute> attributes,
                                      SummaryKind kind, double threshold) {
  std::stable_sort(attributes.begin(), attributes.end(),
                   [](const WeightedAttribute& a, const WeightedAttribute& b) {
                     if (a.frequency != b.frequency) return a.frequency > b.frequency;
                     return a.attribute < b.attribute;
                   });
  std::vector<Concept> groups;
  std::vector<const std::vector<float>*> seeds;
  for (const auto& a : attributes) {
    bool placed = false;
    for (size_t g = 0; g < groups.size(); ++g) {
      if (Cosine(a.vector, *seeds[g]) >= threshold) {
        auto& m = groups[g].members;
        if (std::find(m.begin(), m.end(), a.attribute) == m.end()) m.push_back(a.attribute);
        placed = true;
        break;
      }
    }
    if (!placed) {
      groups.push_back(Concept{a.attribute, kind, {a.attribute}, 0.0});
      seeds.push_back(&a.vector);
    }
  }
  return groups;
}

namespace {

std::vector<std::string> MemberTokens(const std::string& member, const Preprocessor& pre) {
  std::vector<std::string> out;
  for (auto& t : SplitOn(pre.NormalizeTerm(member), ' ')) {
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

bool IsEntityKind(SummaryKind k) {
  return k == SummaryKind::kPerson || k == SummaryKind::kOrganization ||
         k == SummaryKind::kLocation;
}

EntityKind ToEntityKind(SummaryKind k) {
  return k == SummaryKind::kPerson ? EntityKind::kPerson
         : k == SummaryKind::kOrganization ? EntityKind::kOrganization
                                            : EntityKind::kLocation;
}

}  // namespace

std::unordered_map<std::string, std::string> TokenSurfaceForms(const Corpus& corpus) {
  std::unordered_map<std::string, std::string> out;
  for (size_t d = 0; d < corpus.size(); ++d) {
    const auto& tv = corpus.tokens(d);
    for (size_t i = 0; i < tv.tokens.size(); ++i) out.emplace(tv.tokens[i], ToLower(tv.raw_terms[i]));
  }
  return out;
}

size_t ConceptDocumentFrequency(const Concept& c, const Corpus& corpus) {
  std::unordered_set<uint32_t> docs;
  if (IsEntityKind(c.kind)) {
    const int k = static_cast<int>(ToEntityKind(c.kind));
    std::set<std::string> members;
    for (const auto& m : c.members) members.insert(ToLower(Trim(m)));
    for (size_t d = 0; d < corpus.size(); ++d) {
      for (const auto& e : corpus.view(d).entities[k]) {
        if (members.count(e)) {
          docs.insert(static_cast<uint32_t>(d));
          break;
        }
      }
    }
    return docs.size();
  }
  for (const auto& m : c.members) {
    const auto tokens = MemberTokens(m, corpus.preprocessor());
    if (tokens.empty()) continue;
    if (tokens.size() == 1) {
      for (const auto& p : corpus.Postings(tokens[0])) docs.insert(p.doc);
      continue;
    }
    for (const auto& p : corpus.Postings(tokens[0])) {
      bool all = true;
      for (size_t i = 1; i < tokens.size() && all; ++i) all = corpus.TermFrequency(tokens[i], p.doc) > 0;
      if (all) docs.insert(p.doc);
    }
  }
  return docs.size();
}

double DefaultConceptWeight(const Concept& c, const Corpus& corpus) {
  double total = 0.0;
  size_t counted = 0;
  for (const auto& m : c.members) {
    const auto tokens = MemberTokens(m, corpus.preprocessor());
    if (tokens.empty()) continue;
    double member = 0.0;
    for (const auto& t : tokens) {
      const auto postings = corpus.Postings(t);
      if (postings.empty()) continue;
      double s = 0.0;
      for (const auto& p : postings) s += corpus.TfIdf(t, p.doc);
      member += s / static_cast<double>(postings.size());
    }
    total += member / static_cast<double>(tokens.size());
    ++counted;
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

SummarySet BuildSummaries(const Corpus& corpus, const KnowledgeBase& kb,
                          const std::vector<SummaryKind>& kinds, size_t wedge_count) {
  SummarySet set;
  set.wedge_count = wedge_count;
  if (corpus.empty()) return set;

  const auto surfaces = TokenSurfaceForms(corpus);
  std::vector<std::string> keywords;  // distinct tokens as surface forms, sorted
  keywords.reserve(surfaces.size());
  for (const auto& [token, surface] : surfaces) keywords.push_back(surface);
  std::sort(keywords.begin(), keywords.end());

  for (SummaryKind kind : kinds) {
    if (!kb.HasSourceFor(kind)) {
      set.errors[kind] = std::string("no lexicon loaded for ") + SummaryKindName(kind);
      continue;
    }
    std::vector<Concept> concepts;
    if (kind == SummaryKind::kTopic || kind == SummaryKind::kCategory) {
      const auto groups = SummarizeFeatures(keywords, [&](const std::string& t) {
        auto a = kb.AnnotateAttribute(t, kind);
        return a ? std::optional<std::string>(a->descriptor) : std::nullopt;
      });
      for (const auto& g : groups) {
        if (g.mapped) concepts.push_back(Concept{g.descriptor, kind, g.members, 0.0});
      }
    } else if (kind == SummaryKind::kKeyword) {
      for (const auto& [token, surface] : surfaces) {
        concepts.push_back(Concept{surface, kind, {surface}, 0.0});
      }
    } else {
      const int k = static_cast<int>(ToEntityKind(kind));
      std::map<std::string, size_t> mentions;
      for (size_t d = 0; d < corpus.size(); ++d) {
        for (const auto& e : corpus.view(d).entities[k]) ++mentions[e];
      }
      std::vector<WeightedAttribute> embedded;
      std::map<std::string, std::pair<std::string, size_t>> by_region;  // region -> seed
      std::map<std::string, std::vector<std::string>> region_members;
      for (const auto& [surface, freq] : mentions) {
        auto ann = kb.AnnotateAttribute(surface, kind);
        if (kind == SummaryKind::kLocation && ann) {
          std::string region;
          for (const auto& w : WordSequence(ann->descriptor)) {
            if (!corpus.preprocessor().IsStopword(w)) region = w;
          }
          if (!region.empty()) {
            region_members[region].push_back(surface);
            auto& seed = by_region[region];
            if (freq > seed.second || (freq == seed.second && surface < seed.first)) {
              seed = {surface, freq};
            }
            continue;
          }
        }
        std::optional<std::vector<float>> v;
        if (ann && kb.embeddings()) v = EmbedAnnotation(*ann, *kb.embeddings(), corpus.preprocessor());
        if (v) {
          embedded.push_back({surface, std::move(*v), freq});
        } else {
          concepts.push_back(Concept{surface, kind, {surface}, 0.0});
        }
      }
      for (auto& [region, members] : region_members) {
        auto& seed = by_region[region].first;
        std::stable_partition(members.begin(), members.end(),
                              [&](const std::string& m) { return m == seed; });
        concepts.push_back(Concept{seed, kind, members, 0.0});
      }
      for (auto& c : GroupByEmbedding(std::move(embedded), kind)) concepts.push_back(std::move(c));
    }

    std::vector<SummaryEntry> entries;
    entries.reserve(concepts.size());
    for (auto& c : concepts) {
      SummaryEntry e;
      e.frequency = ConceptDocumentFrequency(c, corpus);
      if (e.frequency == 0) continue;
      e.group = std::move(c);
      entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(), [](const SummaryEntry& a, const SummaryEntry& b) {
      if (a.frequency != b.frequency) return a.frequency > b.frequency;
      return a.group.label < b.group.label;
    });
    if (entries.size() > wedge_count) entries.resize(wedge_count);
    const size_t max_freq = entries.empty() ? 0 : entries.front().frequency;
    for (auto& e : entries) {
      e.relevancy = max_freq ? static_cast<double>(e.frequency) / static_cast<double>(max_freq) : 0.0;
      e.group.weight = DefaultConceptWeight(e.group, corpus);
    }
    set.kinds[kind] = std::move(entries);
  }
  return set;
}

}  // namespace curator
