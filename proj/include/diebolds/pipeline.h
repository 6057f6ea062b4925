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


// Staged batch pipeline: configuration, on-disk artifacts, tuning sweeps and
// replicate runs.

#ifndef DIEBOLDS_PIPELINE_H_
#define DIEBOLDS_PIPELINE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diebolds/classify.h"
#include "diebolds/evaluate.h"
#include "diebolds/propagate.h"

namespace diebolds {

enum class Mode { kDS1, kDS2, kDSL, kDieboldsSN, kDieboldsS, kDieboldsN, kDiebolds };

inline constexpr std::array<Mode, 7> kAllModes = {
    Mode::kDS1,       Mode::kDS2,       Mode::kDSL,     Mode::kDieboldsSN,
    Mode::kDieboldsS, Mode::kDieboldsN, Mode::kDiebolds};

std::string_view mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct EdgeToggles {
  bool propagate = true;
  bool use_S = true;
  bool use_N = true;
  bool use_structured_lists = true;

  bool operator==(const EdgeToggles &) const = default;
};

EdgeToggles toggles_for(Mode mode);

struct PipelineConfig {
  std::string target_path;
  std::string structured_path;
  std::string kb_path;
  std::string section_map_path;  // empty: built-in map
  std::string gold_path;         // empty: no IR evaluation
  std::string qa_queries_path;
  std::string qa_answers_path;
  Mode mode = Mode::kDiebolds;
  EdgeToggles edges = toggles_for(Mode::kDiebolds);
  bool structured_seeds = false;
  // Also take structured-corpus lists as classifier training examples.
  bool train_on_structured = false;
  PropConfig prop;
  int top_n = 200;
  double seed_ratio = 0.9;
  uint64_t rng_seed = 1;
  std::string out_dir = "out";
  double neighbor_min_sim = 0.5;
  int neighbor_cap = 10;
  int section_cap = 10;
  int window = kDefaultWindow;
  double drop_top_fraction = 0.05;
  TrainOptions train;  // rng_seed is taken from the pipeline seed

  void set_mode(Mode m);
  void validate() const;
};

// Reads a JSON config. Relative paths are resolved against the file's
// directory. Edge toggles given explicitly must agree with the mode.
PipelineConfig load_config(const std::string &path);
PipelineConfig parse_config(const std::string &json_text,
                            const std::string &base_dir = "");
std::string config_to_json(const PipelineConfig &config);

enum class Stage {
  kIngest, kSeeds, kGraph, kPropagate, kSelect, kFeaturize, kTrain, kExtract,
  kEvaluate
};

inline constexpr std::array<Stage, 9> kAllStages = {
    Stage::kIngest,    Stage::kSeeds, Stage::kGraph,   Stage::kPropagate,
    Stage::kSelect,    Stage::kFeaturize, Stage::kTrain, Stage::kExtract,
    Stage::kEvaluate};

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

struct StageArtifact {
  std::string stage;
  std::string digest;  // SHA-256 over the stage's output digests
  std::string path;    // stage directory
  bool skipped = false;  // inputs unchanged, nothing recomputed
};

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::string &path);

// Holds <out>/.lock for its lifetime.
class PipelineLock {
 public:
  explicit PipelineLock(const std::string &out_dir);
  ~PipelineLock();
  PipelineLock(const PipelineLock &) = delete;
  PipelineLock &operator=(const PipelineLock &) = delete;

 private:
  std::string path_;
};

// Runs one stage. Upstream artifacts must already exist.
StageArtifact run_stage(const PipelineConfig &config, Stage stage,
                        bool force = false);
// Runs every stage in order under the directory lock.
std::vector<StageArtifact> run_all(const PipelineConfig &config,
                                   bool force = false);

struct EvalSummary {
  int runs = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  std::array<double, 11> interpolated_precision{};
  std::optional<QaReport> qa;
};

// Reads <out>/evaluate/report.json.
EvalSummary read_eval_summary(const std::string &out_dir);
std::string summary_to_json(const EvalSummary &summary);

// Runs n_runs full pipelines with rng seeds rng_seed, rng_seed+1, ... under
// <out>/run-<k>, and averages their metrics.
EvalSummary run_replicates(const PipelineConfig &config, int n_runs,
                           bool force = false);

struct TuneRow {
  int top_n = 0;
  double seed_ratio = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct TuneReport {
  std::vector<TuneRow> rows;
  size_t best = 0;
};

// Grid search over top-N and seed ratio. Classifiers trained from the
// development seeds are scored against lists pseudo-labeled by propagating
// the validation seeds (top 200 per relation).
TuneReport tune(const PipelineConfig &config, const std::vector<int> &top_n_grid,
                const std::vector<double> &seed_ratio_grid);
std::string tune_to_json(const TuneReport &report);

}  // namespace diebolds

#endif  // DIEBOLDS_PIPELINE_H_
