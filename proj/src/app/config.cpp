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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "windebm/app.hpp"
#include "windebm/error.hpp"

namespace windebm::app {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = -1;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || x < 0) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || !std::isfinite(x)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "data.name", "data.path", "data.timestamp_column", "data.target_column", "data.exogenous_columns",
      "data.delimiter", "data.timestamp_format",
      "features.mode", "features.n_lags", "features.horizon_steps", "features.horizons",
      "split.train", "split.val", "split.test",
      "model.kind", "model.kinds",
      "train.learning_rate", "train.max_rounds", "train.early_stop_tol", "train.early_stop_patience",
      "train.min_samples_split", "train.min_samples_leaf", "train.main_depth", "train.pair_depth",
      "train.max_bins", "train.pair_bins", "train.interactions", "train.bagging_count", "train.seed",
      "output.dir",
      "benchmark.repeats", "benchmark.threads",
      "explain.pfi_repeats"};
  return keys;
}

const std::vector<std::string>& model_kinds() {
  static const std::vector<std::string> kinds = {"windebm", "windebm-no-interactions", "lr", "rt", "pm"};
  return kinds;
}

bool kind_applicable(const std::string& kind, FeatureMode mode) {
  return kind != "pm" || mode == FeatureMode::kLags;
}

KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::stringstream ss(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    kv[key] = value;
  }
  return kv;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like section.key=value: '" + assignment + "'");
  kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

RunConfig make_run_config(const KeyValues& kv) {
  const auto& keys = known_keys();
  for (const auto& [k, v] : kv) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown config key '" + k + "'");
  }
  auto get = [&](const std::string& k) -> const std::string* {
    const auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  RunConfig c;
  if (auto v = get("data.name")) c.data_name = *v;
  if (auto v = get("data.path")) c.data_path = *v;
  if (auto v = get("data.timestamp_column")) c.schema.timestamp_column = *v;
  if (auto v = get("data.target_column")) c.schema.target_column = *v;
  if (auto v = get("data.exogenous_columns")) c.schema.exogenous_columns = split_list(*v);
  if (auto v = get("data.delimiter")) {
    if (*v == "tab" || *v == "\\t") {
      c.schema.delimiter = '\t';
    } else if (v->size() == 1) {
      c.schema.delimiter = (*v)[0];
    } else {
      throw ConfigError("data.delimiter must be a single character or 'tab'");
    }
  }
  if (auto v = get("data.timestamp_format")) {
    if (*v == "auto") c.schema.timestamp_format = TimestampFormat::kAuto;
    else if (*v == "iso") c.schema.timestamp_format = TimestampFormat::kIso8601;
    else if (*v == "epoch") c.schema.timestamp_format = TimestampFormat::kEpochSeconds;
    else throw ConfigError("data.timestamp_format must be auto, iso or epoch");
  }
  if (auto v = get("features.mode")) {
    if (*v == "lags") c.mode = FeatureMode::kLags;
    else if (*v == "exogenous") c.mode = FeatureMode::kExogenous;
    else throw ConfigError("features.mode must be lags or exogenous");
  }
  if (auto v = get("features.n_lags")) c.n_lags = to_size("features.n_lags", *v);
  if (auto v = get("features.horizon_steps")) c.horizon_steps = to_size("features.horizon_steps", *v);
  if (auto v = get("features.horizons")) {
    for (const auto& h : split_list(*v)) c.horizons.push_back(to_size("features.horizons", h));
  }
  if (auto v = get("split.train")) c.split.train = to_double("split.train", *v);
  if (auto v = get("split.val")) c.split.val = to_double("split.val", *v);
  if (auto v = get("split.test")) c.split.test = to_double("split.test", *v);
  if (auto v = get("model.kind")) c.model_kind = *v;
  if (auto v = get("model.kinds")) c.benchmark_kinds = split_list(*v);
  auto& t = c.train;
  if (auto v = get("train.learning_rate")) t.learning_rate = to_double("train.learning_rate", *v);
  if (auto v = get("train.max_rounds")) t.max_rounds = to_size("train.max_rounds", *v);
  if (auto v = get("train.early_stop_tol")) t.early_stop_tol = to_double("train.early_stop_tol", *v);
  if (auto v = get("train.early_stop_patience")) t.early_stop_patience = to_size("train.early_stop_patience", *v);
  if (auto v = get("train.min_samples_split")) t.min_samples_split = to_size("train.min_samples_split", *v);
  if (auto v = get("train.min_samples_leaf")) t.min_samples_leaf = to_size("train.min_samples_leaf", *v);
  if (auto v = get("train.main_depth")) t.main_depth = static_cast<int>(to_size("train.main_depth", *v));
  if (auto v = get("train.pair_depth")) t.pair_depth = static_cast<int>(to_size("train.pair_depth", *v));
  if (auto v = get("train.max_bins")) t.max_bins = to_size("train.max_bins", *v);
  if (auto v = get("train.pair_bins")) t.pair_bins = to_size("train.pair_bins", *v);
  if (auto v = get("train.interactions")) t.interactions = InteractionBudget::parse(*v);
  if (auto v = get("train.bagging_count")) t.bagging_count = to_size("train.bagging_count", *v);
  if (auto v = get("train.seed")) t.seed = to_size("train.seed", *v);
  if (auto v = get("output.dir")) c.output_dir = *v;
  if (auto v = get("benchmark.repeats")) c.repeats = to_size("benchmark.repeats", *v);
  if (auto v = get("benchmark.threads")) c.threads = to_size("benchmark.threads", *v);
  if (auto v = get("explain.pfi_repeats")) c.pfi_repeats = to_size("explain.pfi_repeats", *v);
  if (c.data_name.empty() && !c.data_path.empty()) {
    const auto slash = c.data_path.find_last_of('/');
    c.data_name = slash == std::string::npos ? c.data_path : c.data_path.substr(slash + 1);
  }
  c.validate();
  return c;
}

void RunConfig::validate() const {
  const auto& kinds = model_kinds();
  if (std::find(kinds.begin(), kinds.end(), model_kind) == kinds.end()) {
    throw ConfigError("unknown model.kind '" + model_kind + "'");
  }
  for (const auto& k : benchmark_kinds) {
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) throw ConfigError("unknown model kind '" + k + "'");
  }
  if (!kind_applicable(model_kind, mode)) {
    throw ConfigError("model.kind = pm requires features.mode = lags (persistence needs historical target lags)");
  }
  if (mode == FeatureMode::kLags && n_lags < 1) throw ConfigError("features.n_lags must be >= 1");
  if (mode == FeatureMode::kExogenous && schema.exogenous_columns.empty()) {
    throw ConfigError("features.mode = exogenous needs data.exogenous_columns");
  }
  if (horizon_steps < 1) throw ConfigError("features.horizon_steps must be >= 1");
  for (auto h : horizons) {
    if (h < 1) throw ConfigError("features.horizons entries must be >= 1");
  }
  if (repeats < 1) throw ConfigError("benchmark.repeats must be >= 1");
  if (pfi_repeats < 1) throw ConfigError("explain.pfi_repeats must be >= 1");
  if (!(split.train > 0 && split.val > 0 && split.test > 0) || std::abs(split.train + split.val + split.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be positive and sum to 1");
  }
  train.validate();
}

}  // namespace windebm::app
