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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "windebm/app.hpp"
#include "windebm/baselines.hpp"
#include "windebm/error.hpp"
#include "windebm/explain.hpp"

namespace windebm::app {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::filesystem::path output_path(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir) / file;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
}

std::string format_name(TimestampFormat f) {
  switch (f) {
    case TimestampFormat::kIso8601: return "iso";
    case TimestampFormat::kEpochSeconds: return "epoch";
    default: return "auto";
  }
}

TimestampFormat format_from(const std::string& s) {
  if (s == "iso") return TimestampFormat::kIso8601;
  if (s == "epoch") return TimestampFormat::kEpochSeconds;
  return TimestampFormat::kAuto;
}

std::map<std::string, std::string> model_metadata(const RunConfig& c, std::size_t horizon, const std::string& kind) {
  std::map<std::string, std::string> m;
  m["data_name"] = c.data_name;
  m["feature_mode"] = c.mode == FeatureMode::kLags ? "lags" : "exogenous";
  m["n_lags"] = std::to_string(c.n_lags);
  m["horizon_steps"] = std::to_string(horizon);
  m["timestamp_column"] = c.schema.timestamp_column;
  m["target_column"] = c.schema.target_column;
  m["exogenous_columns"] = join(c.schema.exogenous_columns, ",");
  m["delimiter"] = std::string(1, c.schema.delimiter);
  m["timestamp_format"] = format_name(c.schema.timestamp_format);
  m["variant"] = kind;
  return m;
}

SupervisedMatrix build_raw(const std::string& path, const CsvSchema& schema, FeatureMode mode, std::size_t n_lags,
                           std::size_t horizon) {
  if (path.empty()) throw ConfigError("data.path is not set");
  const TimeSeriesFrame frame = load_csv(path, schema);
  return mode == FeatureMode::kLags ? build_lag_features(frame, n_lags, horizon) : build_exogenous_features(frame);
}

Matrix rows_of(const Matrix& X, RowRange r) {
  return X.middleRows(static_cast<Eigen::Index>(r.begin), static_cast<Eigen::Index>(r.size()));
}

std::vector<double> targets_of(const SupervisedMatrix& m, RowRange r) {
  return {m.y.data() + r.begin, m.y.data() + r.end};
}

// At most `limit` rows spread evenly over the range, for PDP reference sets.
Matrix strided_rows(const Matrix& X, RowRange r, std::size_t limit) {
  if (r.size() <= limit) return rows_of(X, r);
  Matrix out(static_cast<Eigen::Index>(limit), X.cols());
  for (std::size_t i = 0; i < limit; ++i) {
    const std::size_t src = r.begin + i * r.size() / limit;
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(src));
  }
  return out;
}

constexpr std::size_t kPdpReferenceRows = 2000;

std::vector<double> pdp_grid_for(const AnyModel& model, const PreparedData& data, std::size_t feature) {
  if (const auto* g = std::get_if<GlassBoxModel>(&model)) return bin_center_grid(*g, feature);
  const auto col = column_values(rows_of(data.matrix.X, data.split.train), feature);
  const FeatureBins fb = fit_feature_bins(col, 256);
  std::vector<double> grid;
  for (std::size_t b = 0; b < fb.bin_count(); ++b) grid.push_back(fb.center(b));
  return grid;
}

std::size_t feature_by_name(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ConfigError("unknown feature '" + name + "'; valid names: " + join(names, ", "));
}

const GlassBoxModel& require_glassbox(const ModelFile& file, const std::string& mode) {
  const auto* g = std::get_if<GlassBoxModel>(&file.model);
  if (!g) throw ModelError("explain " + mode + " needs a windebm model, got '" + model_kind(file.model) + "'");
  return *g;
}

std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
  }
  return s;
}

}  // namespace

PreparedData prepare_data(const RunConfig& config, std::size_t horizon_steps) {
  const SupervisedMatrix raw = build_raw(config.data_path, config.schema, config.mode, config.n_lags, horizon_steps);
  PreparedData out;
  out.split = chronological_split(raw.rows(), config.split);
  out.matrix = normalize_fit_apply(raw, out.split.train);
  return out;
}

PreparedData prepare_data_for_model(const RunConfig& config, const ModelFile& model) {
  const auto& md = model.metadata;
  auto get = [&](const std::string& k) -> std::string {
    const auto it = md.find(k);
    if (it == md.end()) throw ModelError("model file lacks data metadata '" + k + "'");
    return it->second;
  };
  CsvSchema schema;
  schema.timestamp_column = get("timestamp_column");
  schema.target_column = get("target_column");
  std::stringstream ss(get("exogenous_columns"));
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) schema.exogenous_columns.push_back(item);
  }
  const std::string delim = get("delimiter");
  schema.delimiter = delim.empty() ? ',' : delim[0];
  schema.timestamp_format = format_from(get("timestamp_format"));
  const FeatureMode mode = get("feature_mode") == "lags" ? FeatureMode::kLags : FeatureMode::kExogenous;
  const std::size_t n_lags = std::stoul(get("n_lags"));
  const std::size_t horizon = std::stoul(get("horizon_steps"));

  SupervisedMatrix raw = build_raw(config.data_path, schema, mode, n_lags, std::max<std::size_t>(horizon, 1));
  const auto& names = model_feature_names(model.model);
  if (raw.cols() != names.size()) {
    throw ModelError("data provides " + std::to_string(raw.cols()) + " features, model expects " +
                     std::to_string(names.size()));
  }
  PreparedData out;
  out.split = chronological_split(raw.rows(), config.split);
  const auto& norm = model_norm(model.model);
  out.matrix = norm ? apply_normalization(std::move(raw), *norm) : std::move(raw);
  return out;
}

TrainOutcome train_kind(const RunConfig& config, const PreparedData& data, const std::string& kind,
                        std::uint64_t seed, std::size_t horizon_steps) {
  TrainOutcome out;
  const auto start = Clock::now();
  if (kind == "windebm" || kind == "windebm-no-interactions") {
    TrainConfig t = config.train;
    t.seed = seed;
    if (kind == "windebm-no-interactions") t.interactions = InteractionBudget::none();
    out.file.model = train_glassbox(data.matrix, data.split, t);
  } else if (kind == "lr") {
    out.file.model = fit_ols(data.matrix, data.split.train);
  } else if (kind == "rt") {
    out.file.model = fit_rt_baseline(data.matrix, data.split.train);
  } else if (kind == "pm") {
    out.file.model = make_persistence(data.matrix);
  } else {
    throw ConfigError("unknown model kind '" + kind + "'");
  }
  out.train_seconds = seconds_since(start);
  out.file.metadata = model_metadata(config, horizon_steps, kind);
  return out;
}

RowRange range_by_name(const DataSplit& split, std::size_t rows, const std::string& name) {
  if (name == "train") return split.train;
  if (name == "val") return split.val;
  if (name == "test") return split.test;
  if (name == "all") return {0, rows};
  throw ConfigError("range must be train, val, test or all");
}

int cmd_train(const RunConfig& config, std::ostream& out) {
  const PreparedData data = prepare_data(config, config.horizon_steps);
  const TrainOutcome trained = train_kind(config, data, config.model_kind, config.train.seed, config.horizon_steps);
  const std::string text = serialize_model(trained.file);
  const auto model_path = output_path(config.output_dir, "model.json");
  write_file(model_path, text);

  std::ostringstream log;
  log << "model_kind: " << config.model_kind << "\n";
  log << "data: " << config.data_path << "\n";
  log << "rows: " << data.matrix.rows() << " (train " << data.split.train.size() << ", val " << data.split.val.size()
      << ", test " << data.split.test.size() << ")\n";
  log << "features: " << join(data.matrix.feature_names, ",") << "\n";
  log << "seed: " << config.train.seed << "\n";
  if (const auto* g = std::get_if<GlassBoxModel>(&trained.file.model)) {
    log << "main_rounds: " << g->summary.main_rounds << "\n";
    log << "pair_rounds: " << g->summary.pair_rounds << "\n";
    std::vector<std::string> pairs;
    for (const auto& p : g->pairs) pairs.push_back(g->feature_names[p.first] + " x " + g->feature_names[p.second]);
    log << "interaction_terms: " << join(pairs, "; ") << "\n";
    std::ostringstream curve;
    curve << "stage,round,validation_nrmse\n";
    for (std::size_t i = 0; i < g->summary.main_validation.size(); ++i) {
      curve << "main," << i + 1 << "," << fmt("%.10g", g->summary.main_validation[i]) << "\n";
    }
    for (std::size_t i = 0; i < g->summary.pair_validation.size(); ++i) {
      curve << "pair," << i + 1 << "," << fmt("%.10g", g->summary.pair_validation[i]) << "\n";
    }
    write_file(output_path(config.output_dir, "validation_curve.csv"), curve.str());
  } else if (const auto* lr = std::get_if<LinearModel>(&trained.file.model); lr && lr->rank_deficient) {
    log << "warning: design matrix is rank deficient (rank " << lr->rank << "); minimum-norm solution used\n";
  }
  log << "checksum: " << fnv1a_hex(text) << "\n";
  log << "training_seconds: " << fmt("%.3f", trained.train_seconds) << "\n";
  write_file(output_path(config.output_dir, "train.log"), log.str());
  out << log.str() << "model written to " << model_path.string() << "\n";
  return kOk;
}

int cmd_evaluate(const RunConfig& config, const std::string& model_path, const std::string& range, std::ostream& out) {
  const ModelFile file = load_model(model_path);
  const PreparedData data = prepare_data_for_model(config, file);
  const RowRange rows = range_by_name(data.split, data.matrix.rows(), range);
  const Predictor predictor = make_predictor(file.model);
  const Matrix X = rows_of(data.matrix.X, rows);
  const auto start = Clock::now();
  const auto forecast = predictor(X);
  const double inference = seconds_since(start);
  const EvalReport report = evaluate(forecast, targets_of(data.matrix, rows));

  const auto variant = file.metadata.count("variant") ? file.metadata.at("variant") : model_kind(file.model);
  std::ostringstream csv;
  csv << "model,range,nrmse,nmae,r2,m,mean_actual,inference_seconds\n";
  csv << variant << "," << range << "," << fmt("%.6f", report.nrmse) << "," << fmt("%.6f", report.nmae) << ","
      << fmt("%.6f", report.r2) << "," << report.m << "," << fmt("%.6f", report.mean_actual) << ","
      << fmt("%.6f", inference) << "\n";
  write_file(output_path(config.output_dir, "metrics.csv"), csv.str());
  out << std::left << std::setw(26) << "model" << std::setw(8) << "range" << std::setw(10) << "NRMSE" << std::setw(10)
      << "NMAE" << std::setw(10) << "R2" << std::setw(8) << "m" << "inference(s)\n";
  out << std::setw(26) << variant << std::setw(8) << range << std::setw(10) << fmt("%.3f", report.nrmse)
      << std::setw(10) << fmt("%.3f", report.nmae) << std::setw(10) << fmt("%.3f", report.r2) << std::setw(8)
      << report.m << fmt("%.4f", inference) << "\n";
  out << report.to_record() << "\n";
  return kOk;
}

int cmd_evaluate_pairs(const std::string& forecasts_csv, const std::string& output_dir, std::ostream& out) {
  std::ifstream in(forecasts_csv);
  if (!in) throw DataError("cannot open '" + forecasts_csv + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string h; std::getline(ss, h, ',');) {
      while (!h.empty() && (h.back() == '\r' || h.back() == ' ')) h.pop_back();
      header.push_back(h);
    }
  }
  const auto fc = std::find(header.begin(), header.end(), "forecast") - header.begin();
  const auto ac = std::find(header.begin(), header.end(), "actual") - header.begin();
  if (static_cast<std::size_t>(fc) == header.size() || static_cast<std::size_t>(ac) == header.size()) {
    throw DataError("expected 'forecast' and 'actual' columns");
  }
  std::vector<double> forecast, actual;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \r") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() < header.size()) throw DataError("short row in '" + forecasts_csv + "'");
    try {
      forecast.push_back(std::stod(fields[static_cast<std::size_t>(fc)]));
      actual.push_back(std::stod(fields[static_cast<std::size_t>(ac)]));
    } catch (const std::exception&) {
      throw DataError("non-numeric value in '" + forecasts_csv + "'");
    }
  }
  const EvalReport report = evaluate(forecast, actual);
  std::ostringstream csv;
  csv << "model,range,nrmse,nmae,r2,m,mean_actual,inference_seconds\n";
  csv << "forecasts,all," << fmt("%.6f", report.nrmse) << "," << fmt("%.6f", report.nmae) << ","
      << fmt("%.6f", report.r2) << "," << report.m << "," << fmt("%.6f", report.mean_actual) << ",0\n";
  write_file(output_path(output_dir, "metrics.csv"), csv.str());
  out << report.to_record() << "\n";
  return kOk;
}

int cmd_predict(const RunConfig& config, const std::string& model_path, const std::string& range, std::ostream& out) {
  const ModelFile file = load_model(model_path);
  const PreparedData data = prepare_data_for_model(config, file);
  const RowRange rows = range_by_name(data.split, data.matrix.rows(), range);
  const auto forecast = make_predictor(file.model)(rows_of(data.matrix.X, rows));
  const auto& norm = model_norm(file.model);
  std::ostringstream csv;
  csv << "timestamp,forecast,actual" << (norm ? ",forecast_raw,actual_raw" : "") << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows.begin + i;
    // Clamping is a presentation step only.
    const double shown = std::clamp(forecast[i], 0.0, 1.0);
    const double actual = data.matrix.y(static_cast<Eigen::Index>(r));
    csv << data.matrix.timestamps[r] << "," << fmt("%.6f", shown) << "," << fmt("%.6f", actual);
    if (norm) csv << "," << fmt("%.6f", norm->target.invert(shown)) << "," << fmt("%.6f", norm->target.invert(actual));
    csv << "\n";
  }
  const auto path = output_path(config.output_dir, "forecasts.csv");
  write_file(path, csv.str());
  out << rows.size() << " forecasts written to " << path.string() << "\n";
  return kOk;
}

std::vector<BenchmarkRow> run_benchmark(const std::vector<RunConfig>& configs) {
  struct Cell {
    std::size_t config = 0;
    std::size_t data = 0;
    std::size_t horizon = 0;
    std::string kind;
    std::size_t repeat = 0;
    EvalReport report;
    double train_seconds = 0, inference_seconds = 0;
  };
  std::vector<PreparedData> datasets;
  std::vector<Cell> cells;
  std::size_t threads = 1;
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const auto& c = configs[ci];
    threads = std::max(threads, c.threads);
    std::vector<std::size_t> horizons = c.horizons.empty() ? std::vector<std::size_t>{c.horizon_steps} : c.horizons;
    if (c.mode == FeatureMode::kExogenous) horizons = {0};
    const auto kinds = c.benchmark_kinds.empty() ? model_kinds() : c.benchmark_kinds;
    for (auto h : horizons) {
      datasets.push_back(prepare_data(c, std::max<std::size_t>(h, 1)));
      for (const auto& kind : kinds) {
        if (!kind_applicable(kind, c.mode)) continue;
        for (std::size_t r = 0; r < c.repeats; ++r) cells.push_back({ci, datasets.size() - 1, h, kind, r, {}, 0, 0});
      }
    }
  }

  // Cells are independent; results land in their own slot, so the output
  // does not depend on scheduling.
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cells.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      auto& cell = cells[i];
      try {
        const auto& c = configs[cell.config];
        const auto& data = datasets[cell.data];
        const TrainOutcome t = train_kind(c, data, cell.kind, c.train.seed + cell.repeat, cell.horizon);
        const auto start = Clock::now();
        const auto forecast = make_predictor(t.file.model)(rows_of(data.matrix.X, data.split.test));
        cell.inference_seconds = seconds_since(start);
        cell.train_seconds = t.train_seconds;
        cell.report = evaluate(forecast, targets_of(data.matrix, data.split.test));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, cells.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<BenchmarkRow> rows;
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i;
    while (j < cells.size() && cells[j].config == cells[i].config && cells[j].horizon == cells[i].horizon &&
           cells[j].kind == cells[i].kind) {
      ++j;
    }
    BenchmarkRow row;
    row.dataset = configs[cells[i].config].data_name;
    row.horizon_steps = cells[i].horizon;
    row.model = cells[i].kind;
    row.runs = j - i;
    const double n = static_cast<double>(row.runs);
    auto stats = [&](auto pick, double& mean, double& sd) {
      mean = 0.0;
      for (std::size_t k = i; k < j; ++k) mean += pick(cells[k]);
      mean /= n;
      double ss = 0.0;
      for (std::size_t k = i; k < j; ++k) ss += (pick(cells[k]) - mean) * (pick(cells[k]) - mean);
      sd = row.runs > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    };
    stats([](const Cell& c) { return c.report.nrmse; }, row.nrmse_mean, row.nrmse_std);
    stats([](const Cell& c) { return c.report.nmae; }, row.nmae_mean, row.nmae_std);
    stats([](const Cell& c) { return c.report.r2; }, row.r2_mean, row.r2_std);
    double unused = 0.0;
    stats([](const Cell& c) { return c.train_seconds; }, row.train_seconds, unused);
    stats([](const Cell& c) { return c.inference_seconds; }, row.inference_seconds, unused);
    rows.push_back(row);
    i = j;
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream csv;
  csv << "dataset,horizon_steps,model,runs,nrmse_mean,nrmse_std,nmae_mean,nmae_std,r2_mean,r2_std\n";
  for (const auto& r : rows) {
    csv << r.dataset << "," << r.horizon_steps << "," << r.model << "," << r.runs << "," << fmt("%.6f", r.nrmse_mean)
        << "," << fmt("%.6f", r.nrmse_std) << "," << fmt("%.6f", r.nmae_mean) << "," << fmt("%.6f", r.nmae_std) << ","
        << fmt("%.6f", r.r2_mean) << "," << fmt("%.6f", r.r2_std) << "\n";
  }
  return csv.str();
}

std::string benchmark_table(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream t;
  t << std::left << std::setw(20) << "dataset" << std::setw(9) << "horizon" << std::setw(26) << "model"
    << std::setw(18) << "NRMSE" << std::setw(18) << "NMAE" << std::setw(18) << "R2" << std::setw(12) << "train(s)"
    << "infer(s)\n";
  for (const auto& r : rows) {
    auto pm = [&](double m, double s) { return fmt("%.3f", m) + (r.runs > 1 ? " +/- " + fmt("%.3f", s) : ""); };
    t << std::setw(20) << r.dataset << std::setw(9) << r.horizon_steps << std::setw(26) << r.model << std::setw(18)
      << pm(r.nrmse_mean, r.nrmse_std) << std::setw(18) << pm(r.nmae_mean, r.nmae_std) << std::setw(18)
      << pm(r.r2_mean, r.r2_std) << std::setw(12) << fmt("%.3f", r.train_seconds) << fmt("%.4f", r.inference_seconds)
      << "\n";
  }
  return t.str();
}

int cmd_benchmark(const std::vector<RunConfig>& configs, std::ostream& out) {
  if (configs.empty()) throw ConfigError("benchmark needs at least one config");
  const auto rows = run_benchmark(configs);
  const std::string& dir = configs.front().output_dir;
  write_file(output_path(dir, "benchmark.csv"), benchmark_csv(rows));
  const std::string table = benchmark_table(rows);
  write_file(output_path(dir, "benchmark.txt"), table);
  out << table;
  for (const auto& c : configs) {
    if (c.mode == FeatureMode::kExogenous) {
      out << "note: pm skipped for " << c.data_name << " (persistence requires historical target lags)\n";
    }
  }
  out << "results written to " << output_path(dir, "benchmark.csv").string() << "\n";
  return kOk;
}

int cmd_explain(const RunConfig& config, const std::string& model_path, const std::string& mode,
                const std::string& argument, bool denormalize, std::ostream& out) {
  const ModelFile file = load_model(model_path);
  const auto& names = model_feature_names(file.model);
  const std::string& dir = config.output_dir;

  if (mode == "shape") {
    const auto& g = require_glassbox(file, mode);
    const ShapeCurve curve = export_shape(g, feature_by_name(names, argument), denormalize);
    std::ostringstream csv;
    csv << "bin_center,value\n";
    for (std::size_t b = 0; b < curve.values.size(); ++b) {
      csv << fmt("%.10g", curve.centers[b]) << "," << fmt("%.10g", curve.values[b]) << "\n";
    }
    const auto path = output_path(dir, "shape_" + sanitize(argument) + ".csv");
    write_file(path, csv.str());
    out << "shape function of " << argument << " (" << curve.values.size() << " bins) written to " << path.string() << "\n";
    return kOk;
  }
  if (mode == "heatmap") {
    const auto& g = require_glassbox(file, mode);
    const auto comma = argument.find(',');
    if (comma == std::string::npos) throw ConfigError("heatmap takes FEATURE_A,FEATURE_B");
    const std::size_t a = feature_by_name(names, argument.substr(0, comma));
    const std::size_t b = feature_by_name(names, argument.substr(comma + 1));
    const PairHeatmap map = export_pair_heatmap(g, {std::min(a, b), std::max(a, b)}, denormalize);
    std::ostringstream csv;
    csv << "row,col,value\n";
    for (std::size_t r = 0; r < map.row_centers.size(); ++r) {
      for (std::size_t c = 0; c < map.col_centers.size(); ++c) {
        csv << fmt("%.10g", map.row_centers[r]) << "," << fmt("%.10g", map.col_centers[c]) << ","
            << fmt("%.10g", map.at(r, c)) << "\n";
      }
    }
    const auto path = output_path(dir, "heatmap_" + sanitize(map.first) + "_" + sanitize(map.second) + ".csv");
    write_file(path, csv.str());
    out << "interaction " << map.first << " x " << map.second << " (" << map.row_centers.size() << "x"
        << map.col_centers.size() << ") written to " << path.string() << "\n";
    return kOk;
  }

  const PreparedData data = prepare_data_for_model(config, file);
  const auto& split = data.split;
  if (mode == "global") {
    const auto& g = require_glassbox(file, mode);
    const auto report = global_importance(g, rows_of(data.matrix.X, split.train));
    std::ostringstream csv, txt;
    csv << "term,kind,score\n";
    txt << "Global term importance (mean |contribution| over " << split.train.size() << " training rows)\n";
    for (const auto& t : report.terms) {
      csv << t.name << "," << (t.is_pair ? "pair" : "main") << "," << fmt("%.10g", t.score) << "\n";
      txt << "  " << std::left << std::setw(32) << t.name << fmt("%.4f", t.score) << "\n";
    }
    write_file(output_path(dir, "global_importance.csv"), csv.str());
    write_file(output_path(dir, "global_importance.txt"), txt.str());
    out << txt.str();
    return kOk;
  }
  if (mode == "local") {
    const auto& g = require_glassbox(file, mode);
    std::size_t idx = 0;
    try {
      idx = std::stoul(argument);
    } catch (const std::exception&) {
      throw ConfigError("local takes a row index within the test range");
    }
    if (idx >= split.test.size()) {
      throw ConfigError("row " + argument + " outside the test range (" + std::to_string(split.test.size()) + " rows)");
    }
    const auto r = static_cast<Eigen::Index>(split.test.begin + idx);
    const Eigen::VectorXd rowv = data.matrix.X.row(r).transpose();
    const auto expl = local_explanation(g, {rowv.data(), static_cast<std::size_t>(rowv.size())}, data.matrix.y(r));
    std::ostringstream csv;
    csv << "term,contribution\nintercept," << fmt("%.10g", expl.intercept) << "\n";
    double running = expl.intercept;
    std::ostringstream txt;
    txt << expl.summary_line() << "\n";
    txt << "  " << std::left << std::setw(32) << "intercept" << fmt("%+.4f", expl.intercept) << "\n";
    for (const auto& c : expl.contributions) {
      running += c.value;
      csv << c.name << "," << fmt("%.10g", c.value) << "\n";
      txt << "  " << std::setw(32) << c.name << fmt("%+.4f", c.value) << "   running " << fmt("%.4f", running) << "\n";
    }
    csv << "forecast," << fmt("%.10g", expl.forecast) << "\n";
    write_file(output_path(dir, "local_" + argument + ".csv"), csv.str());
    out << txt.str();
    return kOk;
  }

  const Predictor predictor = make_predictor(file.model);
  if (mode == "pdp") {
    const std::size_t f = feature_by_name(names, argument);
    const auto grid = pdp_grid_for(file.model, data, f);
    const auto curve = pdp(predictor, strided_rows(data.matrix.X, split.train, kPdpReferenceRows), f, grid);
    std::ostringstream csv;
    csv << "grid,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) csv << fmt("%.10g", grid[i]) << "," << fmt("%.10g", curve[i]) << "\n";
    const auto path = output_path(dir, "pdp_" + sanitize(argument) + ".csv");
    write_file(path, csv.str());
    const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
    out << "partial dependence of " << argument << " (range " << fmt("%.4f", *hi - *lo) << ") written to "
        << path.string() << "\n";
    return kOk;
  }
  if (mode == "pfi" || mode == "consistency") {
    const Matrix Xtest = rows_of(data.matrix.X, split.test);
    const auto ytest = targets_of(data.matrix, split.test);
    const auto importance = pfi(predictor, Xtest, ytest, config.pfi_repeats, config.train.seed);
    const auto pfi_order = ordering_from_scores(names, importance);
    if (mode == "pfi") {
      std::ostringstream csv, txt;
      csv << "feature,importance\n";
      txt << "Permutation feature importance (NRMSE increase, " << config.pfi_repeats << " repeats, test range)\n";
      for (std::size_t f = 0; f < names.size(); ++f) csv << names[f] << "," << fmt("%.10g", importance[f]) << "\n";
      for (const auto& n : pfi_order) {
        const auto f = feature_by_name(names, n);
        txt << "  " << std::left << std::setw(32) << n << fmt("%.5f", importance[f]) << "\n";
      }
      write_file(output_path(dir, "pfi.csv"), csv.str());
      out << txt.str();
      return kOk;
    }
    const auto& g = require_glassbox(file, mode);
    const auto glass_order = global_importance(g, rows_of(data.matrix.X, split.train)).ordering(false);
    std::vector<std::vector<double>> grids;
    for (std::size_t f = 0; f < names.size(); ++f) grids.push_back(bin_center_grid(g, f));
    const auto ranges = pdp_importance(predictor, strided_rows(data.matrix.X, split.train, kPdpReferenceRows), grids);
    const auto pdp_order = ordering_from_scores(names, ranges);
    const auto gp = ranking_consistency(glass_order, pfi_order);
    const auto gd = ranking_consistency(glass_order, pdp_order);
    std::ostringstream txt, csv;
    txt << "glass-box: " << join(glass_order, " > ") << "\n";
    txt << "PFI:       " << join(pfi_order, " > ") << "\n";
    txt << "PDP range: " << join(pdp_order, " > ") << "\n";
    txt << "glass-box vs PFI: exact=" << (gp.exact_match ? "yes" : "no") << " spearman=" << fmt("%.3f", gp.rank_correlation)
        << "\n";
    txt << "glass-box vs PDP: exact=" << (gd.exact_match ? "yes" : "no") << " spearman=" << fmt("%.3f", gd.rank_correlation)
        << "\n";
    csv << "comparison,exact_match,spearman\n";
    csv << "glassbox_vs_pfi," << gp.exact_match << "," << fmt("%.6f", gp.rank_correlation) << "\n";
    csv << "glassbox_vs_pdp," << gd.exact_match << "," << fmt("%.6f", gd.rank_correlation) << "\n";
    write_file(output_path(dir, "consistency.csv"), csv.str());
    out << txt.str();
    return kOk;
  }
  throw ConfigError("unknown explain mode '" + mode + "' (global, local, shape, heatmap, pdp, pfi, consistency)");
}

}  // namespace windebm::app
