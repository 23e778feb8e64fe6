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

// curator: command-line driver for headless runs.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "curator/adapt.h"
#include "curator/concept_rule.h"
#include "curator/error.h"
#include "curator/feedback.h"
#include "curator/json_io.h"
#include "curator/knowledge.h"
#include "curator/rank.h"
#include "curator/rule_lang.h"
#include "curator/service.h"
#include "curator/summarize.h"
#include "curator/synth.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Loaded {
  std::unique_ptr<curator::Corpus> corpus;
  std::unique_ptr<curator::KnowledgeBase> kb;
};

Loaded LoadInputs(const std::string& corpus_path, const std::string& lexicon_dir) {
  Loaded l;
  l.corpus = std::make_unique<curator::Corpus>();
  l.corpus->IngestFile(corpus_path);
  l.kb = std::make_unique<curator::KnowledgeBase>();
  if (!lexicon_dir.empty()) *l.kb = curator::KnowledgeBase::LoadDirectory(lexicon_dir);
  l.kb->AttachEntities(l.corpus.get());
  return l;
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw curator::Unavailable("cannot create " + dir + ": " + ec.message());
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw curator::Unavailable("cannot write " + path);
  out << text;
}

std::string Fmt(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *v);
  return buf;
}

struct RunOptions {
  std::string corpus, lexicon, rule, labels, verdicts, config, out = "run_out";
  std::string feedback = "oracle";
  int rounds = 5;
  std::optional<uint64_t> seed;
  std::optional<int> k, window;
  std::optional<double> threshold, sample_rate, epsilon;
  std::optional<size_t> min_evidence;
  bool no_conceptual = false;
};

int CmdRun(const RunOptions& o) {
  curator::AdaptConfig cfg;
  if (!o.config.empty()) cfg.LoadFile(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.k) cfg.children_cap = *o.k;
  if (o.window) cfg.window = *o.window;
  if (o.threshold) cfg.precision_threshold = *o.threshold;
  if (o.sample_rate) cfg.sample_rate = *o.sample_rate;
  if (o.epsilon) cfg.epsilon = *o.epsilon;
  if (o.min_evidence) cfg.min_evidence = *o.min_evidence;
  if (o.no_conceptual) cfg.conceptual = false;
  cfg.Validate();

  const auto start = std::chrono::steady_clock::now();
  Loaded in = LoadInputs(o.corpus, o.lexicon);
  curator::DnfOptions dnf;
  dnf.children_cap = cfg.children_cap;
  curator::RuleTree seed_rule = curator::LoadRuleFile(o.rule, dnf, "rule");

  std::unique_ptr<curator::LabelSet> labels;
  if (!o.labels.empty()) labels = std::make_unique<curator::LabelSet>(curator::LabelSet::Load(o.labels));
  std::unique_ptr<curator::FeedbackSource> source;
  if (o.feedback == "oracle") {
    if (!labels) throw curator::ConfigError("--feedback oracle requires --labels");
    source = std::make_unique<curator::OracleSource>(labels.get());
  } else {
    if (o.verdicts.empty()) throw curator::ConfigError("--feedback scripted requires --verdicts");
    source = std::make_unique<curator::ScriptedSource>(curator::ScriptedSource::Load(o.verdicts));
  }

  curator::AdaptEngine engine(in.corpus.get(), in.kb.get(), seed_rule, cfg);
  if (labels) engine.set_labels(labels.get());
  EnsureDir(o.out);
  curator::WriteJsonFile((fs::path(o.out) / "config.json").string(), cfg.ToJson());
  for (int r = 0; r < o.rounds; ++r) {
    const curator::RoundReport rep = engine.RunRound(*source);
    curator::WriteJsonFile((fs::path(o.out) / ("round_" + std::to_string(rep.round) + ".json")).string(),
                           rep.ToJson());
    std::fprintf(stderr, "round %d: annotated %zu, sampled %zu, precision %s, actions %zu\n",
                 rep.round, rep.items_annotated, rep.sample_size, Fmt(rep.precision).c_str(),
                 rep.actions.size());
  }
  WriteText((fs::path(o.out) / "final.rule").string(), curator::RenderRuleFile(engine.rule()));
  WriteText((fs::path(o.out) / "seed.rule").string(), curator::RenderRuleFile(seed_rule));
  curator::WriteJsonFile((fs::path(o.out) / "rule.json").string(), curator::RuleToJson(engine.rule()));
  curator::WriteJsonFile((fs::path(o.out) / "state.json").string(), engine.StateJson());

  json summary = {{"seed", cfg.seed}, {"rounds", o.rounds}, {"feedback", o.feedback}};
  if (labels) {
    const auto seed_eval = curator::EvaluateRule(seed_rule, *in.corpus, *labels, engine.concepts());
    const auto final_eval = curator::EvaluateRule(engine.rule(), *in.corpus, *labels, engine.concepts());
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    summary["seed_rule"] = {{"annotated", seed_eval.annotated}, {"precision", opt(seed_eval.precision)}};
    summary["final_rule"] = {{"annotated", final_eval.annotated}, {"precision", opt(final_eval.precision)}};
  }
  curator::WriteJsonFile((fs::path(o.out) / "summary.json").string(), summary);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "done in %.2fs; artifacts in %s\n", secs, o.out.c_str());
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int CmdReport(const std::string& dir, const std::string& corpus_path, const std::string& lexicon,
              const std::string& labels_path) {
  std::vector<json> rounds;
  for (int r = 1;; ++r) {
    const fs::path p = fs::path(dir) / ("round_" + std::to_string(r) + ".json");
    if (!fs::exists(p)) break;
    rounds.push_back(curator::ReadJsonFile(p.string()));
  }
  if (rounds.empty()) throw curator::NotFound("no round reports in " + dir);
  std::printf("%-6s %10s %8s %10s %10s %8s %8s\n", "round", "annotated", "sampled", "est.prec",
              "true.prec", "actions", "stable");
  const auto pct = [](const json& v) {
    return v.is_null() ? std::string("-") : Fmt(v.get<double>());
  };
  for (const auto& r : rounds) {
    std::printf("%-6d %10zu %8zu %10s %10s %8zu %8zu\n", r.at("round").get<int>(),
                r.at("items_annotated").get<size_t>(), r.at("sample_size").get<size_t>(),
                pct(r.at("precision")).c_str(), pct(r.at("labeled_precision")).c_str(),
                r.at("actions").size(), r.at("stabilized_paths").size());
  }
  const fs::path summary_path = fs::path(dir) / "summary.json";
  if (fs::exists(summary_path)) {
    const json s = curator::ReadJsonFile(summary_path.string());
    if (s.contains("final_rule")) {
      std::printf("final rule: %zu annotated, precision %s\n",
                  s["final_rule"]["annotated"].get<size_t>(), pct(s["final_rule"]["precision"]).c_str());
    }
  }
  if (!corpus_path.empty() && !labels_path.empty()) {
    // KEYM baseline: any-match over the final rule's keyword arguments.
    Loaded in = LoadInputs(corpus_path, lexicon);
    const auto labels = curator::LabelSet::Load(labels_path);
    curator::RuleTree final_rule = curator::LoadRuleFile((fs::path(dir) / "final.rule").string());
    std::vector<std::string> bag;
    for (const auto& p : curator::EnumeratePaths(final_rule)) {
      for (const auto& f : p.features) {
        if (f.function == curator::FeatureFunction::kKeyword && !f.negated &&
            std::find(bag.begin(), bag.end(), f.argument) == bag.end()) {
          bag.push_back(f.argument);
        }
      }
    }
    size_t matched = 0, labeled = 0, relevant = 0;
    for (size_t d = 0; d < in.corpus->size(); ++d) {
      if (!curator::KeymMatch(bag, in.corpus->view(d), in.corpus->preprocessor())) continue;
      ++matched;
      if (auto l = labels.Get(in.corpus->doc(d).doc_id, final_rule.tag().label)) {
        ++labeled;
        if (*l) ++relevant;
      }
    }
    std::optional<double> prec;
    if (labeled) prec = static_cast<double>(relevant) / static_cast<double>(labeled);
    std::printf("KEYM baseline (%zu keywords): %zu annotated, precision %s\n", bag.size(), matched,
                Fmt(prec).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curator: adaptive curation rules, concept summaries, and ranking"};
  app.require_subcommand(1);

  // ingest
  std::string corpus, lexicon, out;
  auto* ingest = app.add_subcommand("ingest", "Validate and index a JSONL corpus");
  ingest->add_option("--corpus", corpus, "Corpus JSONL")->required();
  ingest->add_option("--lexicon", lexicon, "Lexicon directory");
  ingest->add_option("--out", out, "Write index stats JSON here");

  // summarize
  std::string kind;
  size_t wedges = 50;
  auto* summarize = app.add_subcommand("summarize", "Build concept summaries");
  summarize->add_option("--corpus", corpus, "Corpus JSONL")->required();
  summarize->add_option("--lexicon", lexicon, "Lexicon directory");
  summarize->add_option("--kind", kind, "topic|category|person|organization|location|keyword");
  summarize->add_option("--wedges", wedges, "Concepts per kind")->check(CLI::PositiveNumber);
  summarize->add_option("--out", out, "Output JSON file");

  // run
  RunOptions ro;
  auto* run = app.add_subcommand("run", "Run adaptation rounds");
  run->add_option("--corpus", ro.corpus, "Corpus JSONL")->required();
  run->add_option("--lexicon", ro.lexicon, "Lexicon directory");
  run->add_option("--rule", ro.rule, "Seed rule file")->required();
  run->add_option("--labels", ro.labels, "Ground-truth labels JSONL");
  run->add_option("--verdicts", ro.verdicts, "Scripted verdicts JSONL");
  run->add_option("--rounds", ro.rounds, "Rounds")->check(CLI::PositiveNumber);
  run->add_option("--feedback", ro.feedback, "oracle|scripted")
      ->check(CLI::IsMember({"oracle", "scripted"}));
  run->add_option("--seed", ro.seed, "Seed");
  run->add_option("--config", ro.config, "key = value config file");
  run->add_option("--k", ro.k, "Children cap / restriction count");
  run->add_option("--precision-threshold", ro.threshold, "Imprecise below this");
  run->add_option("--sample-rate", ro.sample_rate, "Fraction of annotated items verified");
  run->add_option("--epsilon", ro.epsilon, "Stopping tolerance");
  run->add_option("--window", ro.window, "Smoothing window");
  run->add_option("--min-evidence", ro.min_evidence, "Verified items before judging a path");
  run->add_flag("--no-conceptual", ro.no_conceptual, "Keyword candidates only");
  run->add_option("--out", ro.out, "Output directory");

  // rank
  std::string preference;
  size_t top = 20;
  std::string expr;
  auto* rank = app.add_subcommand("rank", "Rank documents by a concept preference");
  rank->add_option("--corpus", corpus, "Corpus JSONL")->required();
  rank->add_option("--lexicon", lexicon, "Lexicon directory");
  rank->add_option("--preference", preference, "Preference JSON");
  rank->add_option("--expr", expr, "Concept rule, e.g. \"[A AND B] OR C\"");
  rank->add_option("--top", top, "Rows")->check(CLI::PositiveNumber);
  rank->add_option("--out", out, "Output JSON file");

  // report
  std::string dir, labels;
  auto* report = app.add_subcommand("report", "Per-round precision table");
  report->add_option("--dir", dir, "Run output directory")->required();
  report->add_option("--corpus", corpus, "Corpus JSONL (for the KEYM baseline)");
  report->add_option("--lexicon", lexicon, "Lexicon directory");
  report->add_option("--labels", labels, "Labels JSONL (for the KEYM baseline)");

  // serve
  std::string host = "0.0.0.0", workspace;
  int port = 0;
  auto* serve = app.add_subcommand("serve", "HTTP JSON API");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (default $CURATOR_PORT or 8080)");
  serve->add_option("--workspace", workspace, "Workspace (default $CURATOR_WORKSPACE or ./workspace)");

  // synth
  curator::SynthParams sp;
  std::string synth_out = "synth_out";
  auto* synth = app.add_subcommand("synth", "Generate a planted-topic corpus");
  synth->add_option("--docs", sp.docs, "Documents")->check(CLI::PositiveNumber);
  synth->add_option("--topics", sp.topics, "Topics")->check(CLI::PositiveNumber);
  synth->add_option("--seed", sp.seed, "Seed");
  synth->add_option("--seed-precision", sp.seed_precision, "Target seed-rule precision");
  synth->add_option("--noise", sp.noise_rate, "Off-topic borrowing rate");
  synth->add_option("--out", synth_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*ingest) {
      Loaded in = LoadInputs(corpus, lexicon);
      const auto st = in.corpus->stats();
      json j = {{"documents", st.doc_count}, {"vocabulary", st.vocabulary}, {"postings", st.postings}};
      if (!out.empty()) curator::WriteJsonFile(out, j);
      std::cout << j.dump(2) << "\n";
    } else if (*summarize) {
      Loaded in = LoadInputs(corpus, lexicon);
      std::vector<curator::SummaryKind> kinds(std::begin(curator::kAllSummaryKinds),
                                              std::end(curator::kAllSummaryKinds));
      if (!kind.empty()) {
        auto k = curator::ParseSummaryKind(kind);
        if (!k) throw curator::InvalidArgument("unknown kind: " + kind);
        kinds = {*k};
      }
      const json j = curator::SummariesToJson(curator::BuildSummaries(*in.corpus, *in.kb, kinds, wedges));
      if (!out.empty()) curator::WriteJsonFile(out, j);
      std::cout << j.dump(2) << "\n";
    } else if (*run) {
      return CmdRun(ro);
    } else if (*rank) {
      if (preference.empty() == expr.empty()) {
        std::cerr << "usage error: give exactly one of --preference or --expr\n";
        return 1;
      }
      Loaded in = LoadInputs(corpus, lexicon);
      json j;
      if (!preference.empty()) {
        const auto pref = curator::PreferenceFromJson(curator::ReadJsonFile(preference), in.kb.get());
        j = curator::RankedToJson(curator::Rank(pref, *in.corpus, top), pref);
      } else {
        curator::Preference used;
        const auto parsed = curator::ParseConceptRule(expr);
        const auto ranked = curator::EvalConceptRule(
            parsed, *in.corpus,
            [&](const std::string& name) -> std::optional<curator::Concept> {
              if (const auto* c = curator::ResolveByName(*in.kb, name)) return *c;
              return std::nullopt;
            },
            top, &used);
        j = curator::RankedToJson(ranked, used);
      }
      if (!out.empty()) curator::WriteJsonFile(out, j);
      std::cout << j.dump(2) << "\n";
    } else if (*report) {
      return CmdReport(dir, corpus, lexicon, labels);
    } else if (*serve) {
      if (port == 0) {
        const char* env = std::getenv("CURATOR_PORT");
        port = env ? std::atoi(env) : 8080;
      }
      if (workspace.empty()) {
        const char* env = std::getenv("CURATOR_WORKSPACE");
        workspace = env ? env : "workspace";
      }
      curator::Service service(workspace);
      std::fprintf(stderr, "serving /v1 on %s:%d (workspace %s)\n", host.c_str(), port,
                   workspace.c_str());
      service.Serve(host, port);
    } else if (*synth) {
      const auto c = curator::GenerateSynthetic(sp);
      curator::WriteSynthetic(c, synth_out);
      std::cout << json{{"out", synth_out}, {"docs", sp.docs}, {"relevant", c.relevant},
                        {"tag", c.tag}, {"seed_keyword", c.seed_keyword}}.dump(2)
                << "\n";
    }
  } catch (const curator::Error& e) {
    std::cerr << "error (" << curator::ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
