// Copyright 2026 The Diebolds Authors.
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


// Command-line driver for the extraction pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "diebolds/pipeline.h"
#include "diebolds/synthdata.h"
#include "json.hpp"

namespace {

using diebolds::PipelineConfig;

struct Common {
  std::string config;
  std::string mode;
  std::string out;
  bool force = false;
};

PipelineConfig resolve_config(const Common &o) {
  if (o.config.empty()) throw diebolds::Error("--config is required");
  PipelineConfig c = diebolds::load_config(o.config);
  if (!o.mode.empty()) {
    auto m = diebolds::parse_mode(o.mode);
    if (!m) throw diebolds::Error("unknown mode '" + o.mode + "'");
    c.set_mode(*m);
  }
  if (!o.out.empty()) c.out_dir = o.out;
  c.validate();
  return c;
}

void print_artifact(const diebolds::StageArtifact &a) {
  std::cout << a.stage << '\t' << (a.skipped ? "skipped" : "done") << '\t' << a.digest
            << '\n';
}

int fail(const std::string &verb, const std::string &message, int code) {
  nlohmann::json j = {{"error", message}, {"verb", verb}};
  std::cerr << j.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Graph-based distantly supervised relation extraction"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", common.config, "pipeline config (JSON)");
    sub->add_option("--mode", common.mode, "DS1, DS2, DS+L, DIEBOLDS-SN, DIEBOLDS-S, DIEBOLDS-N or DIEBOLDS");
    sub->add_option("--out", common.out, "output directory");
    sub->add_flag("--force", common.force, "recompute even when inputs are unchanged");
  };

  std::vector<std::pair<diebolds::Stage, CLI::App *>> stage_cmds;
  for (diebolds::Stage s : diebolds::kAllStages) {
    CLI::App *sub = app.add_subcommand(std::string(diebolds::stage_name(s)),
                                       "run the " + std::string(diebolds::stage_name(s)) + " stage");
    add_common(sub);
    stage_cmds.push_back({s, sub});
  }
  CLI::App *run = app.add_subcommand("run", "run all stages");
  add_common(run);

  CLI::App *tune = app.add_subcommand("tune", "grid search over top-N and seed ratio");
  add_common(tune);
  std::vector<int> top_n_grid{1200, 2000, 5000};
  std::vector<double> ratio_grid{1.0};
  tune->add_option("--top-n", top_n_grid, "top-N values")->delimiter(',');
  tune->add_option("--seed-ratios", ratio_grid, "fractions of development seeds")
      ->delimiter(',');

  CLI::App *replicate = app.add_subcommand("replicate", "average several seeded runs");
  add_common(replicate);
  int runs = 3;
  replicate->add_option("--runs", runs, "number of runs")->check(CLI::PositiveNumber);

  CLI::App *plot = app.add_subcommand("plot-data", "emit the 11-point PR curve as CSV");
  add_common(plot);

  CLI::App *synth = app.add_subcommand("synth", "generate a synthetic corpus");
  diebolds::SynthSpec spec;
  std::string synth_out = "synthetic";
  synth->add_option("--out", synth_out, "directory to write");
  synth->add_option("--target-docs", spec.n_target_docs);
  synth->add_option("--structured-docs", spec.n_structured_docs);
  synth->add_option("--facts-per-doc", spec.facts_per_doc);
  synth->add_option("--list-rate", spec.list_rate);
  synth->add_option("--ambiguity-rate", spec.ambiguity_rate);
  synth->add_option("--noise-rate", spec.noise_rate);
  synth->add_option("--kb-coverage", spec.kb_coverage);
  synth->add_option("--generic-cue-rate", spec.generic_cue_rate);
  synth->add_option("--bullet-rate", spec.bullet_rate);
  synth->add_option("--vocab-per-relation", spec.vocab_per_relation);
  synth->add_option("--vocab-skew", spec.vocab_skew);
  synth->add_option("--seed", spec.rng_seed);

  std::string verb = "diebolds";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return fail(verb, e.what(), 2);
  }

  try {
    for (const auto &[stage, sub] : stage_cmds) {
      if (!sub->parsed()) continue;
      verb = sub->get_name();
      print_artifact(diebolds::run_stage(resolve_config(common), stage, common.force));
    }
    if (run->parsed()) {
      verb = "run";
      for (const auto &a : diebolds::run_all(resolve_config(common), common.force)) {
        print_artifact(a);
      }
    }
    if (tune->parsed()) {
      verb = "tune";
      auto report = diebolds::tune(resolve_config(common), top_n_grid, ratio_grid);
      std::cout << diebolds::tune_to_json(report) << '\n';
    }
    if (replicate->parsed()) {
      verb = "replicate";
      auto summary = diebolds::run_replicates(resolve_config(common), runs, common.force);
      std::cout << diebolds::summary_to_json(summary) << '\n';
    }
    if (plot->parsed()) {
      verb = "plot-data";
      PipelineConfig c = resolve_config(common);
      const auto report_path = std::filesystem::path(c.out_dir) / "evaluate" / "report.json";
      std::ifstream report(report_path);
      if (!report) throw diebolds::Error("no evaluation report in '" + c.out_dir + "'; run 'evaluate' first");
      const std::string have = nlohmann::json::parse(report).value("mode", "");
      if (have != diebolds::mode_name(c.mode)) {
        throw diebolds::Error("report in '" + c.out_dir + "' is for mode " + have + ", not " +
                              std::string(diebolds::mode_name(c.mode)));
      }
      auto summary = diebolds::read_eval_summary(c.out_dir);
      std::cout << "recall,precision\n";
      for (int i = 0; i <= 10; ++i) {
        std::cout << diebolds::format_double(i / 10.0) << ','
                  << diebolds::format_double(summary.interpolated_precision[i]) << '\n';
      }
    }
    if (synth->parsed()) {
      verb = "synth";
      diebolds::SynthData data = diebolds::generate(spec);
      diebolds::write_synth(data, synth_out);
      nlohmann::ordered_json config = {{"target", "target.jsonl"},
                                       {"structured", "structured.jsonl"},
                                       {"kb", "kb.tsv"},
                                       {"gold", "gold.tsv"},
                                       {"mode", "DIEBOLDS"},
                                       {"out", "out"}};
      std::ofstream(std::filesystem::path(synth_out) / "config.json")
          << config.dump(2) << '\n';
      std::cout << "wrote " << data.target.documents.size() << " target and "
                << data.structured.documents.size() << " structured documents, "
                << data.kb.size() << " KB triples to " << synth_out << '\n';
    }
  } catch (const std::exception &e) {
    return fail(verb, e.what(), 1);
  }
  return 0;
}
