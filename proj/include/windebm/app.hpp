// Copyright 2026 The WindEBM Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "windebm/data.hpp"
#include "windebm/glassbox.hpp"
#include "windebm/metrics.hpp"
#include "windebm/model_io.hpp"

namespace windebm::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kDataFailure = 3, kModelFailure = 4 };

enum class FeatureMode { kLags, kExogenous };

// Flat "section.key" -> value pairs. Later sources override earlier ones.
using KeyValues = std::map<std::string, std::string>;

// Parses "[section]" headers and "key = value" lines; '#' and ';' start
// comments. Keys come back as "section.key".
KeyValues parse_config_text(const std::string& text);
KeyValues read_config_file(const std::string& path);
// "section.key=value"
void apply_override(KeyValues& kv, const std::string& assignment);
const std::vector<std::string>& known_keys();

struct RunConfig {
  std::string data_name;
  std::string data_path;
  CsvSchema schema;
  FeatureMode mode = FeatureMode::kExogenous;
  std::size_t n_lags = 48;
  std::size_t horizon_steps = 1;
  std::vector<std::size_t> horizons;  // benchmark sweep; empty means {horizon_steps}
  SplitFractions split;
  std::string model_kind = "windebm";
  std::vector<std::string> benchmark_kinds;  // empty means every applicable kind
  TrainConfig train;
  std::string output_dir = "windebm_out";
  std::size_t repeats = 1;
  std::size_t threads = 1;
  std::size_t pfi_repeats = 5;

  void validate() const;
};

// Throws ConfigError on unknown keys or unparseable values.
RunConfig make_run_config(const KeyValues& kv);

const std::vector<std::string>& model_kinds();
bool kind_applicable(const std::string& kind, FeatureMode mode);

struct PreparedData {
  SupervisedMatrix matrix;  // normalized
  DataSplit split;
};

// Loads the CSV, builds features, splits chronologically and normalizes on
// the training range.
PreparedData prepare_data(const RunConfig& config, std::size_t horizon_steps);
// Rebuilds inputs the way the model file describes and applies its
// normalization.
PreparedData prepare_data_for_model(const RunConfig& config, const ModelFile& model);

struct TrainOutcome {
  ModelFile file;
  double train_seconds = 0.0;
};

TrainOutcome train_kind(const RunConfig& config, const PreparedData& data, const std::string& kind,
                        std::uint64_t seed, std::size_t horizon_steps);

RowRange range_by_name(const DataSplit& split, std::size_t rows, const std::string& name);

struct BenchmarkRow {
  std::string dataset;
  std::size_t horizon_steps = 0;
  std::string model;
  std::size_t runs = 0;
  double nrmse_mean = 0, nrmse_std = 0, nmae_mean = 0, nmae_std = 0, r2_mean = 0, r2_std = 0;
  double train_seconds = 0, inference_seconds = 0;  // means; not part of the CSV
};

std::vector<BenchmarkRow> run_benchmark(const std::vector<RunConfig>& configs);
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);
std::string benchmark_table(const std::vector<BenchmarkRow>& rows);

// Subcommands. Human-readable output goes to `out`; files go to the
// configured output directory.
int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_evaluate(const RunConfig& config, const std::string& model_path, const std::string& range, std::ostream& out);
int cmd_evaluate_pairs(const std::string& forecasts_csv, const std::string& output_dir, std::ostream& out);
int cmd_predict(const RunConfig& config, const std::string& model_path, const std::string& range, std::ostream& out);
int cmd_benchmark(const std::vector<RunConfig>& configs, std::ostream& out);
int cmd_explain(const RunConfig& config, const std::string& model_path, const std::string& mode,
                const std::string& argument, bool denormalize, std::ostream& out);

}  // namespace windebm::app
