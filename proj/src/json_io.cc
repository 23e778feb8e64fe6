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

#include "curator/json_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "curator/error.h"
#include "curator/rule_lang.h"

namespace curator {

using nlohmann::json;

json FeatureToJson(const Feature& f) {
  return {{"dataset", f.dataset},   {"function", FunctionName(f.function)},
          {"operator", OperatorName(f.op)}, {"argument", f.argument},
          {"negated", f.negated},   {"key", f.Key()},
          {"text", RenderFeature(f)}};
}

json ConceptToJson(const Concept& c) {
  return {{"label", c.label},
          {"kind", SummaryKindName(c.kind)},
          {"members", c.members},
          {"weight", c.weight}};
}

namespace {

json NodeToJson(const RuleNode& n) {
  json children = json::array();
  for (const auto& c : n.children) children.push_back(NodeToJson(c));
  return {{"id", n.id}, {"feature", FeatureToJson(n.feature)}, {"children", children}};
}

}  // namespace

json RuleToJson(const RuleTree& rule) {
  json nodes = json::array();
  for (const auto& r : rule.roots()) nodes.push_back(NodeToJson(r));
  json paths = json::array();
  for (const auto& p : EnumeratePaths(rule)) {
    json feats = json::array();
    for (const auto& f : p.features) feats.push_back(RenderFeature(f));
    paths.push_back({{"path_id", p.path_id}, {"features", feats}, {"node_ids", p.node_ids}});
  }
  return {{"rule_id", rule.rule_id()},
          {"tag", rule.tag().label},
          {"children_cap", rule.children_cap()},
          {"dsl", Render(rule)},
          {"nodes", nodes},
          {"paths", paths}};
}

json SummariesToJson(const SummarySet& set) {
  json kinds = json::object();
  for (const auto& [kind, entries] : set.kinds) {
    json arr = json::array();
    for (const auto& e : entries) {
      arr.push_back({{"label", e.group.label},
                     {"members", e.group.members},
                     {"frequency", e.frequency},
                     {"relevancy", e.relevancy},
                     {"weight", e.group.weight}});
    }
    kinds[SummaryKindName(kind)] = arr;
  }
  json errors = json::object();
  for (const auto& [kind, msg] : set.errors) errors[SummaryKindName(kind)] = msg;
  return {{"wedge_count", set.wedge_count}, {"kinds", kinds}, {"errors", errors}};
}

void WriteJsonFile(const std::string& path, const json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Unavailable("cannot write " + path);
    out << j.dump(2) << "\n";
    if (!out) throw Unavailable("write failed: " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Unavailable("cannot rename to " + path);
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace curator
