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

// Acceptance suite. Every criterion prints one PASS/FAIL/SKIP line with the
// measured values and the tolerance it was judged against.
//
//   windebm_acceptance            run everything
//   windebm_acceptance --only N   run criterion N (exit 77 when skipped)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "windebm/app.hpp"
#include "windebm/baselines.hpp"
#include "windebm/explain.hpp"
#include "windebm/glassbox.hpp"
#include "windebm/metrics.hpp"

using namespace windebm;
using windebm::testing::rows_of;
using windebm::testing::slice;

namespace {

// Pinned tolerances and budgets.
constexpr double kMetricTol = 1e-12;
constexpr double kAdditivityTol = 1e-12;
constexpr double kCenteringTol = 1e-9;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kPdpTol = 1e-6;
constexpr double kRecoveryR2 = 0.95;
constexpr double kPairStrengthRelTol = 1e-6;
constexpr double kReproductionTol = 0.03;
constexpr double kFastBudgetSeconds = 1.0;
constexpr double kRecoveryBudgetSeconds = 120.0;
constexpr int kSkipped = 77;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::kPass : Status::kFail, std::move(detail)}; }

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ">") + x;
  return s;
}

// The synthetic recovery set, shared by criteria 6 and 7.
struct RecoveryData {
  SupervisedMatrix data;
  DataSplit split;
  GlassBoxModel full;
  double train_seconds = 0.0;
};

const RecoveryData& recovery() {
  static const RecoveryData r = [] {
    RecoveryData out;
    out.data = windebm::testing::interaction_dataset(20000, 2026);
    out.split = chronological_split(out.data.rows());
    const auto t = Clock::now();
    out.full = train_glassbox(out.data, out.split, TrainConfig{});
    out.train_seconds = since(t);
    return out;
  }();
  return r;
}

// Default-config model on the interaction set, shared by criteria 2 and 3.
const std::pair<SupervisedMatrix, GlassBoxModel>& invariant_model() {
  static const auto m = [] {
    SupervisedMatrix d = windebm::testing::interaction_dataset(5000, 11);
    const GlassBoxModel g = train_glassbox(d, chronological_split(d.rows()), TrainConfig{});
    return std::pair{std::move(d), g};
  }();
  return m;
}

Outcome metric_oracle() {
  const auto t = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 2 + rng() % 500;
    std::vector<double> f(m), a(m);
    for (std::size_t k = 0; k < m; ++k) {
      f[k] = u(rng);
      a[k] = u(rng);
    }
    worst = std::max({worst, std::fabs(nrmse(f, a) - oracle::nrmse(f, a)), std::fabs(nmae(f, a) - oracle::nmae(f, a)),
                      std::fabs(r2(f, a) - oracle::r2(f, a))});
  }
  const std::vector<double> hf{0.5, 0.5}, ha{0.0, 1.0};
  const bool hand = nrmse(hf, ha) == 0.5 && nmae(hf, ha) == 0.5 && r2(hf, ha) == 0.0;
  const double secs = since(t);
  return verdict(worst <= kMetricTol && hand && secs < kFastBudgetSeconds,
                 "max |lib - naive| = " + num(worst) + " (tol " + num(kMetricTol) + "), hand case " +
                     (hand ? "exact" : "WRONG") + ", " + num(secs, "%.3f") + " s");
}

Outcome additivity() {
  const auto& [d, m] = invariant_model();
  const auto t = Clock::now();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  double worst = 0.0;
  std::vector<double> row(d.cols());
  for (int i = 0; i < 1000; ++i) {
    for (auto& v : row) v = u(rng);
    const Breakdown b = predict_with_breakdown(m, row);
    double sum = b.intercept;
    for (const auto& c : b.contributions) sum += c.value;
    worst = std::max(worst, std::fabs(predict_row(m, row) - sum));
  }
  const double secs = since(t);
  return verdict(worst <= kAdditivityTol && secs < kFastBudgetSeconds,
                 "max |predict - (intercept + sum)| = " + num(worst) + " over 1000 rows, " +
                     std::to_string(m.term_count()) + " terms (tol " + num(kAdditivityTol) + "), " +
                     num(secs, "%.3f") + " s");
}

Outcome centering() {
  const auto& [d, m] = invariant_model();
  const DataSplit split = chronological_split(d.rows());
  double worst = 0.0;
  for (std::size_t f = 0; f < m.feature_count(); ++f) {
    double s = 0.0, n = 0.0;
    for (std::size_t r = split.train.begin; r < split.train.end; ++r) {
      s += m.shapes[f].values[m.bins.features[f].bin_of(d.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)))];
      n += 1.0;
    }
    worst = std::max(worst, std::fabs(s / n));
  }
  for (const auto& p : m.pairs) {
    const auto pop = pair_population(m, p, d.X, split.train);
    double s = 0.0, n = 0.0;
    for (std::size_t c = 0; c < pop.size(); ++c) {
      s += pop[c] * p.values[c];
      n += pop[c];
    }
    worst = std::max(worst, std::fabs(s / n));
  }
  const double gap = std::fabs(m.intercept - oracle::mean(slice(d.y, split.train)));
  return verdict(worst <= kCenteringTol && gap <= kCenteringTol,
                 "max |weighted term mean| = " + num(worst) + ", |intercept - mean(y_train)| = " + num(gap) + " (tol " +
                     num(kCenteringTol) + ")");
}

Outcome monotone_loss() {
  const SupervisedMatrix d = windebm::testing::interaction_dataset(4000, 4);
  TrainConfig c;
  c.max_rounds = 200;
  c.early_stop_patience = 0;
  c.track_training_loss = true;
  const GlassBoxModel m = train_glassbox(d, chronological_split(d.rows()), c);
  const auto& loss = m.summary.training_loss;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < loss.size(); ++i) worst = std::max(worst, loss[i] - loss[i - 1]);
  const bool full_run = m.summary.main_rounds == 200 && m.summary.pair_rounds == 200;
  return verdict(worst <= kMonotoneSlack && full_run,
                 std::to_string(loss.size() - 1) + " steps over " + std::to_string(m.summary.main_rounds) + "+" +
                     std::to_string(m.summary.pair_rounds) + " cycles, largest step change " + num(worst) +
                     " (slack " + num(kMonotoneSlack) + "), MSE " + num(loss.front(), "%.4f") + " -> " +
                     num(loss.back(), "%.4f"));
}

Outcome pdp_shape() {
  const SupervisedMatrix d = windebm::testing::additive_dataset(5000, 5, 5);
  TrainConfig c;
  c.interactions = InteractionBudget::none();
  const GlassBoxModel m = train_glassbox(d, chronological_split(d.rows()), c);
  const Predictor p = glassbox_predictor(m);
  double worst = 0.0;
  for (std::size_t f = 0; f < m.feature_count(); ++f) {
    const auto grid = bin_center_grid(m, f);
    const auto curve = pdp(p, d.X, f, grid);
    const auto& shape = m.shapes[f].values;
    double cm = 0.0, sm = 0.0;
    for (std::size_t b = 0; b < curve.size(); ++b) {
      cm += curve[b];
      sm += shape[b];
    }
    cm /= static_cast<double>(curve.size());
    sm /= static_cast<double>(curve.size());
    for (std::size_t b = 0; b < curve.size(); ++b) worst = std::max(worst, std::fabs((curve[b] - cm) - (shape[b] - sm)));
  }
  return verdict(worst <= kPdpTol && m.pairs.empty(),
                 "max |centered PDP - centered shape| = " + num(worst) + " over " +
                     std::to_string(m.feature_count()) + " features (tol " + num(kPdpTol) + ")");
}

Outcome synthetic_recovery() {
  const auto t = Clock::now();
  const auto& r = recovery();
  const auto& d = r.data;
  const Matrix Xtest = rows_of(d.X, r.split.test);
  const auto ytest = slice(d.y, r.split.test);
  const double test_r2 = r2(predict(r.full, Xtest), ytest);

  // Pair ranking on the main-effect residuals, checked against brute force.
  const BinningMap bins = fit_bins(d.X, r.split.train, TrainConfig{}.max_bins);
  const MainEffectsResult main = train_main_effects(d, r.split, bins, TrainConfig{});
  const BinnedMatrix coarse = coarsen(apply_bins(bins, d.X), main.model.pair_binning);
  const auto ranked = rank_interaction_pairs(coarse, main.residuals, r.split.train);
  std::vector<std::size_t> rows;
  for (std::size_t i = r.split.train.begin; i < r.split.train.end; ++i) rows.push_back(i);
  double worst_rel = 0.0;
  std::size_t oracle_best = 0;
  std::vector<double> brute;
  for (const auto& s : ranked) {
    brute.push_back(oracle::pair_strength(coarse, main.residuals, rows, s.pair.first, s.pair.second));
    worst_rel = std::max(worst_rel, std::fabs(s.strength - brute.back()) / std::max(brute.back(), 1e-12));
    if (brute.back() > brute[oracle_best]) oracle_best = brute.size() - 1;
  }
  const bool pair_first = ranked.front().pair == FeaturePair{2, 3} && oracle_best == 0;

  // Three per-feature rankings; the noise features x5 and x6 must close each.
  const std::vector<std::string>& names = r.full.feature_names;
  const auto glass = global_importance(r.full, rows_of(d.X, r.split.train)).ordering(false);
  const Predictor p = glassbox_predictor(r.full);
  const auto pfi_scores = pfi(p, Xtest, ytest, 5, 7);
  const auto pfi_order = ordering_from_scores(names, pfi_scores);
  std::vector<std::vector<double>> grids;
  for (std::size_t f = 0; f < names.size(); ++f) grids.push_back(bin_center_grid(r.full, f));
  Matrix ref(2000, 6);
  for (Eigen::Index i = 0; i < 2000; ++i) ref.row(i) = d.X.row(static_cast<Eigen::Index>(r.split.train.begin) + i * 8);
  const auto pdp_order = ordering_from_scores(names, pdp_importance(p, ref, grids));
  auto noise_last = [](const std::vector<std::string>& o) {
    const std::vector<std::string> tail(o.end() - 2, o.end());
    return std::is_permutation(tail.begin(), tail.end(), std::vector<std::string>{"x5", "x6"}.begin());
  };
  const bool rankings = noise_last(glass) && noise_last(pfi_order) && noise_last(pdp_order);
  const double secs = since(t);
  return verdict(test_r2 >= kRecoveryR2 && pair_first && worst_rel <= kPairStrengthRelTol && rankings &&
                     secs < kRecoveryBudgetSeconds,
                 "test R2 " + num(test_r2, "%.4f") + " (>= " + num(kRecoveryR2) + "); top pair (x" +
                     std::to_string(ranked.front().pair.first + 1) + ",x" + std::to_string(ranked.front().pair.second + 1) +
                     ") strength " + num(ranked.front().strength, "%.2f") + " vs next " + num(ranked[1].strength, "%.2f") +
                     ", brute-force rel diff " + num(worst_rel) + "; glass-box " + join(glass) + "; PFI " +
                     join(pfi_order) + "; PDP " + join(pdp_order) + "; " + num(secs, "%.1f") + " s");
}

Outcome ablation() {
  const auto& r = recovery();
  TrainConfig k0;
  k0.interactions = InteractionBudget::none();
  const GlassBoxModel gam = train_glassbox(r.data, r.split, k0);
  const LinearModel lr = fit_ols(r.data, r.split.train);
  const Matrix X = rows_of(r.data.X, r.split.test);
  const auto y = slice(r.data.y, r.split.test);
  const double full = nrmse(predict(r.full, X), y), no_pairs = nrmse(predict(gam, X), y),
               linear = nrmse(predict_lr(lr, X), y);
  return verdict(full < no_pairs && no_pairs < linear,
                 "test NRMSE full " + num(full, "%.4f") + " < no-interactions " + num(no_pairs, "%.4f") + " < OLS " +
                     num(linear, "%.4f") + " (raw units of the synthetic target)");
}

Outcome dataset_reproduction() {
  const char* path = std::getenv("WINDEBM_GEFCOM_ZONE1");
  if (!path || !std::filesystem::exists(path)) {
    return {Status::kSkip,
            "set WINDEBM_GEFCOM_ZONE1 to the zone-1 CSV to run; without it criteria 5-7 stand in"};
  }
  app::KeyValues kv;
  kv["data.name"] = "gefcom-zone1";
  kv["data.path"] = path;
  kv["data.timestamp_column"] = "TIMESTAMP";
  kv["data.target_column"] = "TARGETVAR";
  kv["data.exogenous_columns"] = "U10,V10,U100,V100";
  const app::RunConfig c = app::make_run_config(kv);
  const app::PreparedData data = app::prepare_data(c, 1);
  const Matrix X = rows_of(data.matrix.X, data.split.test);
  const auto y = slice(data.matrix.y, data.split.test);
  const auto t = Clock::now();
  const GlassBoxModel m = train_glassbox(data.matrix, data.split, c.train);
  const double secs = since(t);
  const EvalReport w = evaluate(predict(m, X), y);
  const double lr = nrmse(predict_lr(fit_ols(data.matrix, data.split.train), X), y);
  const double rt = nrmse(predict_rt(fit_rt_baseline(data.matrix, data.split.train), X), y);
  const bool close = std::fabs(w.nrmse - 0.182) <= kReproductionTol && std::fabs(w.nmae - 0.135) <= kReproductionTol &&
                     std::fabs(w.r2 - 0.713) <= kReproductionTol;
  return verdict(close && w.nrmse < lr && w.nrmse < rt,
                 "NRMSE " + num(w.nrmse, "%.3f") + " NMAE " + num(w.nmae, "%.3f") + " R2 " + num(w.r2, "%.3f") +
                     " vs 0.182/0.135/0.713 (+/-" + num(kReproductionTol) + "); LR " + num(lr, "%.3f") + ", RT " +
                     num(rt, "%.3f") + "; training " + num(secs, "%.2f") + " s (reported only)");
}

Outcome persistence_horizon() {
  const TimeSeriesFrame f = windebm::testing::autocorrelated_series(8000, 9);
  auto pm_nrmse = [&](std::size_t h) {
    const SupervisedMatrix raw = build_lag_features(f, 24, h);
    const DataSplit split = chronological_split(raw.rows());
    const SupervisedMatrix m = normalize_fit_apply(raw, split.train);
    const auto out = persistence_forecast(make_persistence(m), rows_of(m.X, split.test));
    return nrmse(out, slice(m.y, split.test));
  };
  const double half = pm_nrmse(1), four = pm_nrmse(8);
  return verdict(four > half, "30-min series, 24 lags: PM NRMSE 4 h " + num(four, "%.4f") + " > 0.5 h " +
                                  num(half, "%.4f"));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("windebm_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const auto d = windebm::testing::interaction_dataset(3000, 12);
  {
    std::ofstream out(dir / "exo.csv");
    out << "timestamp,power,a,b,c,d,e,f\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < d.X.rows(); ++r) {
      out << r * 3600 << "," << d.y(r);
      for (Eigen::Index c = 0; c < 6; ++c) out << "," << d.X(r, c);
      out << "\n";
    }
    const auto s = windebm::testing::autocorrelated_series(3000, 13);
    std::ofstream lag(dir / "lag.csv");
    lag << "timestamp,power\n";
    lag.precision(17);
    for (std::size_t t = 0; t < s.size(); ++t) lag << s.timestamps[t] << "," << s.target[t] << "\n";
  }
  auto exo_config = [&](const std::string& out) {
    app::KeyValues kv;
    kv["data.name"] = "exo";
    kv["data.path"] = (dir / "exo.csv").string();
    kv["data.exogenous_columns"] = "a,b,c,d,e,f";
    kv["train.seed"] = "17";
    kv["train.bagging_count"] = "2";
    kv["output.dir"] = (dir / out).string();
    return app::make_run_config(kv);
  };
  auto lag_config = [&](const std::string& out) {
    app::KeyValues kv;
    kv["data.name"] = "lag";
    kv["data.path"] = (dir / "lag.csv").string();
    kv["features.mode"] = "lags";
    kv["features.n_lags"] = "8";
    kv["features.horizons"] = "1,4";
    kv["benchmark.repeats"] = "2";
    kv["benchmark.threads"] = "3";
    kv["train.max_rounds"] = "300";
    kv["output.dir"] = (dir / out).string();
    return app::make_run_config(kv);
  };
  std::ostringstream sink;
  app::cmd_train(exo_config("a"), sink);
  app::cmd_train(exo_config("b"), sink);
  app::cmd_benchmark({lag_config("a"), exo_config("a")}, sink);
  app::cmd_benchmark({lag_config("b"), exo_config("b")}, sink);
  const std::string ma = slurp(dir / "a" / "model.json"), mb = slurp(dir / "b" / "model.json");
  const std::string ba = slurp(dir / "a" / "benchmark.csv"), bb = slurp(dir / "b" / "benchmark.csv");
  fs::remove_all(dir);
  const bool ok = !ma.empty() && ma == mb && !ba.empty() && ba == bb;
  return verdict(ok, "model.json " + std::to_string(ma.size()) + " bytes " + (ma == mb ? "identical" : "DIFFER") +
                         " (checksum " + fnv1a_hex(ma) + "); benchmark.csv " + std::to_string(ba.size()) + " bytes " +
                         (ba == bb ? "identical" : "DIFFER") + " with 3 worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<Criterion> criteria = {
      {1, "metric oracle equivalence", metric_oracle},
      {2, "additivity", additivity},
      {3, "centering and intercept", centering},
      {4, "monotone boosting loss", monotone_loss},
      {5, "PDP equals shape function", pdp_shape},
      {6, "synthetic recovery", synthetic_recovery},
      {7, "ablation ordering", ablation},
      {8, "public dataset reproduction", dataset_reproduction},
      {9, "persistence error grows with horizon", persistence_horizon},
      {10, "determinism", determinism},
  };
  int failures = 0, ran = 0, skipped = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    ++ran;
    Outcome o;
    const auto t = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kSkip ? "SKIP" : "FAIL";
    std::printf("%s  criterion %2d  %-38s %s [%.2f s]\n", tag, c.id, c.name.c_str(), o.detail.c_str(), since(t));
    std::fflush(stdout);
    failures += o.status == Status::kFail;
    skipped += o.status == Status::kSkip;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  if (failures) return 1;
  return (only && skipped) ? kSkipped : 0;
}
