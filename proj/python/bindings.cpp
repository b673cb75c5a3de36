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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "windebm/baselines.hpp"
#include "windebm/data.hpp"
#include "windebm/error.hpp"
#include "windebm/explain.hpp"
#include "windebm/glassbox.hpp"
#include "windebm/metrics.hpp"
#include "windebm/model_io.hpp"

namespace py = pybind11;
using namespace windebm;

namespace {

SupervisedMatrix to_matrix(const Matrix& X, const Vector& y, std::vector<std::string> names) {
  if (X.rows() != y.size()) throw DataError("X and y have different row counts");
  SupervisedMatrix m;
  m.X = X;
  m.y = y;
  if (names.empty()) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) names.push_back("x" + std::to_string(c + 1));
  }
  if (names.size() != static_cast<std::size_t>(X.cols())) throw DataError("one feature name per column required");
  m.feature_names = std::move(names);
  for (Eigen::Index r = 0; r < X.rows(); ++r) m.timestamps.push_back(r);
  return m;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["nrmse"] = r.nrmse;
  d["nmae"] = r.nmae;
  d["r2"] = r.r2;
  d["m"] = r.m;
  return d;
}

std::vector<double> row_vector(const Eigen::VectorXd& row) { return {row.data(), row.data() + row.size()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Glass-box additive boosting for wind power forecasting";

  static py::exception<Error> base(m, "WindEBMError", PyExc_RuntimeError);
  static py::exception<DataError> data_error(m, "DataError", base.ptr());
  static py::exception<ModelError> model_error(m, "ModelError", base.ptr());
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      PyErr_SetString(data_error.ptr(), e.what());
    } catch (const ModelError& e) {
      PyErr_SetString(model_error.ptr(), e.what());
    } catch (const ConfigError& e) {
      PyErr_SetString(config_error.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  m.def("nrmse", [](const std::vector<double>& f, const std::vector<double>& a) { return nrmse(f, a); },
        py::arg("forecast"), py::arg("actual"));
  m.def("nmae", [](const std::vector<double>& f, const std::vector<double>& a) { return nmae(f, a); },
        py::arg("forecast"), py::arg("actual"));
  m.def("r2", [](const std::vector<double>& f, const std::vector<double>& a) { return r2(f, a); },
        py::arg("forecast"), py::arg("actual"));
  m.def("evaluate", [](const std::vector<double>& f, const std::vector<double>& a) { return report_dict(evaluate(f, a)); },
        py::arg("forecast"), py::arg("actual"), "NRMSE, NMAE, R^2 and the sample count as a dict.");
  m.def("pearson_correlation",
        [](const std::vector<double>& a, const std::vector<double>& b) { return pearson_correlation(a, b); });

  m.def(
      "lag_features",
      [](const std::vector<double>& series, std::size_t n_lags, std::size_t horizon) {
        TimeSeriesFrame f;
        for (std::size_t i = 0; i < series.size(); ++i) f.timestamps.push_back(static_cast<std::int64_t>(i));
        f.target = series;
        const SupervisedMatrix s = build_lag_features(f, n_lags, horizon);
        return py::make_tuple(s.X, s.y);
      },
      py::arg("series"), py::arg("n_lags"), py::arg("horizon") = 1,
      "Lag matrix (oldest lag first) and the target `horizon` steps after the last lag.");
  m.def(
      "chronological_split",
      [](std::size_t rows, double train, double val, double test) {
        const DataSplit s = chronological_split(rows, {train, val, test});
        py::dict d;
        d["train"] = py::make_tuple(s.train.begin, s.train.end);
        d["val"] = py::make_tuple(s.val.begin, s.val.end);
        d["test"] = py::make_tuple(s.test.begin, s.test.end);
        return d;
      },
      py::arg("rows"), py::arg("train") = 0.8, py::arg("val") = 0.1, py::arg("test") = 0.1);

  py::class_<GlassBoxModel>(m, "GlassBoxModel")
      .def_readonly("intercept", &GlassBoxModel::intercept)
      .def_readonly("feature_names", &GlassBoxModel::feature_names)
      .def_property_readonly("pairs",
                             [](const GlassBoxModel& g) {
                               std::vector<std::pair<std::size_t, std::size_t>> out;
                               for (const auto& p : g.pairs) out.emplace_back(p.first, p.second);
                               return out;
                             })
      .def_property_readonly("rounds",
                             [](const GlassBoxModel& g) {
                               return py::make_tuple(g.summary.main_rounds, g.summary.pair_rounds);
                             })
      .def("predict", [](const GlassBoxModel& g, const Matrix& X) { return predict(g, X); })
      .def(
          "breakdown",
          [](const GlassBoxModel& g, const Eigen::VectorXd& row) {
            const Breakdown b = predict_with_breakdown(g, row_vector(row));
            std::vector<std::pair<std::string, double>> terms;
            for (const auto& c : b.contributions) terms.emplace_back(c.name, c.value);
            return py::make_tuple(b.intercept, terms, b.forecast);
          },
          "(intercept, [(term, contribution)], forecast) for one row.")
      .def(
          "shape",
          [](const GlassBoxModel& g, const std::string& feature) {
            const ShapeCurve c = export_shape(g, find_feature(g, feature));
            return py::make_tuple(c.centers, c.values);
          },
          "Bin centers and shape values of one feature.")
      .def("save", [](const GlassBoxModel& g, const std::string& path) { save_model(g, path); })
      .def_static("load", &load_glassbox);

  m.def(
      "train_glassbox",
      [](const Matrix& X, const Vector& y, std::vector<std::string> feature_names, double train, double val, double test,
         double learning_rate, std::size_t max_rounds, const std::string& interactions, std::size_t max_bins,
         std::size_t pair_bins, std::size_t early_stop_patience, std::size_t bagging_count, std::uint64_t seed) {
        const SupervisedMatrix data = to_matrix(X, y, std::move(feature_names));
        TrainConfig c;
        c.learning_rate = learning_rate;
        c.max_rounds = max_rounds;
        c.interactions = InteractionBudget::parse(interactions);
        c.max_bins = max_bins;
        c.pair_bins = pair_bins;
        c.early_stop_patience = early_stop_patience;
        c.bagging_count = bagging_count;
        c.seed = seed;
        py::gil_scoped_release release;
        return train_glassbox(data, chronological_split(data.rows(), {train, val, test}), c);
      },
      py::arg("X"), py::arg("y"), py::arg("feature_names") = std::vector<std::string>{}, py::arg("train") = 0.8,
      py::arg("val") = 0.1, py::arg("test") = 0.1, py::arg("learning_rate") = 0.001, py::arg("max_rounds") = 5000,
      py::arg("interactions") = "auto", py::arg("max_bins") = 256, py::arg("pair_bins") = 32,
      py::arg("early_stop_patience") = 50, py::arg("bagging_count") = 0, py::arg("seed") = 0,
      "Fits on the leading `train` fraction of rows; the next `val` fraction drives early stopping.");

  py::class_<LinearModel>(m, "LinearModel")
      .def_readonly("intercept", &LinearModel::intercept)
      .def_readonly("weights", &LinearModel::weights)
      .def_readonly("rank_deficient", &LinearModel::rank_deficient)
      .def("predict", [](const LinearModel& l, const Matrix& X) { return predict_lr(l, X); });
  m.def(
      "fit_ols",
      [](const Matrix& X, const Vector& y) {
        const SupervisedMatrix data = to_matrix(X, y, {});
        return fit_ols(data, {0, data.rows()});
      },
      py::arg("X"), py::arg("y"));

  m.def(
      "persistence_forecast",
      [](const Matrix& X, std::size_t latest_lag) {
        PersistenceModel p;
        p.latest_lag = latest_lag;
        return persistence_forecast(p, X);
      },
      py::arg("X"), py::arg("latest_lag"));

  m.def(
      "global_importance",
      [](const GlassBoxModel& g, const Matrix& X) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& t : global_importance(g, X).terms) out.emplace_back(t.name, t.score);
        return out;
      },
      py::arg("model"), py::arg("X"), "Mean |contribution| per term, largest first.");
  m.def(
      "pdp",
      [](const GlassBoxModel& g, const Matrix& X, const std::string& feature) {
        const std::size_t f = find_feature(g, feature);
        const auto grid = bin_center_grid(g, f);
        return py::make_tuple(grid, pdp(glassbox_predictor(g), X, f, grid));
      },
      py::arg("model"), py::arg("X"), py::arg("feature"));
  m.def(
      "pfi",
      [](const GlassBoxModel& g, const Matrix& X, const std::vector<double>& y, std::size_t repeats, std::uint64_t seed) {
        return pfi(glassbox_predictor(g), X, y, repeats, seed);
      },
      py::arg("model"), py::arg("X"), py::arg("y"), py::arg("repeats") = 5, py::arg("seed") = 0,
      "NRMSE increase when each feature is permuted, averaged over repeats.");
}
