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

#ifndef CURATOR_SUMMARIZE_H_
#define CURATOR_SUMMARIZE_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "curator/concept.h"
#include "curator/corpus.h"
#include "curator/knowledge.h"

namespace curator {

// One output group of descriptor-based summarization. `mapped` is false for
// the singleton fallback group of an attribute without a descriptor.
struct FeatureGroup {
  std::string descriptor;
  std::vector<std::string> members;
  bool mapped = true;
};

using DescriptorMapper = std::function<std::optional<std::string>(const std::string&)>;

// Collects the distinct descriptors of `attributes` (first-appearance order),
// then assigns every attribute to the group of its descriptor. Unmapped
// attributes become singleton groups named after themselves. Duplicate
// attributes are reported once.
std::vector<FeatureGroup> SummarizeFeatures(const std::vector<std::string>& attributes,
                                            const DescriptorMapper& mapper);

// Sum of the embeddings of the descriptor's words (stopwords and OOV words
// skipped); nullopt when no word has a vector.
std::optional<std::vector<float>> EmbedAnnotation(const Annotation& annotation,
                                                  const EmbeddingTable& table,
                                                  const Preprocessor& pre);

struct WeightedAttribute {
  std::string attribute;
  std::vector<float> vector;
  size_t frequency = 0;
};

// Greedy seeded agglomeration in descending frequency (ties by attribute):
// join the first group whose seed vector has cosine >= threshold, otherwise
// seed a new group. The label is the seed (highest-frequency) member.
std::vector<Concept> GroupByEmbedding(std::vector<WeightedAttribute> attributes,
                                      SummaryKind kind, double threshold = 0.7);

struct SummaryEntry {
  Concept group;
  size_t frequency = 0;    // documents containing any member
  double relevancy = 0.0;  // frequency / max frequency within the kind
};

struct SummarySet {
  size_t wedge_count = 50;
  std::map<SummaryKind, std::vector<SummaryEntry>> kinds;
  std::map<SummaryKind, std::string> errors;  // kinds that could not be built
};

// Token -> lowercase surface form, the first one seen in corpus order.
// Normalizing the surface gives back the token.
std::unordered_map<std::string, std::string> TokenSurfaceForms(const Corpus& corpus);

// Mean over members of each member's mean tf-idf across the documents that
// contain it.
double DefaultConceptWeight(const Concept& c, const Corpus& corpus);

// Number of documents containing at least one member.
size_t ConceptDocumentFrequency(const Concept& c, const Corpus& corpus);

SummarySet BuildSummaries(const Corpus& corpus, const KnowledgeBase& kb,
                          const std::vector<SummaryKind>& kinds, size_t wedge_count = 50);

}  // namespace curator

#endif  // CURATOR_SUMMARIZE_H_
