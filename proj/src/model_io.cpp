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

#include "windebm/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "windebm/error.hpp"

namespace windebm {
namespace {

using json = nlohmann::json;

[[noreturn]] void corrupt(const std::string& why) { throw ModelError("corrupt model file: " + why); }

json scale_json(const ColumnScale& s) { return {{"min", s.min}, {"max", s.max}}; }
ColumnScale scale_from(const json& j) { return {j.at("min").get<double>(), j.at("max").get<double>()}; }

json norm_json(const std::optional<NormParams>& norm) {
  if (!norm) return nullptr;
  json features = json::array();
  for (const auto& s : norm->features) features.push_back(scale_json(s));
  return {{"features", features}, {"target", scale_json(norm->target)}};
}

std::optional<NormParams> norm_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  NormParams p;
  for (const auto& s : j.at("features")) p.features.push_back(scale_from(s));
  p.target = scale_from(j.at("target"));
  return p;
}

json bins_json(const BinningMap& map) {
  json edges = json::array();
  for (const auto& f : map.features) {
    edges.push_back({{"cuts", f.cuts}, {"lo", f.lo}, {"hi", f.hi}, {"population", f.population}});
  }
  return edges;
}

BinningMap bins_from(const json& j, std::size_t max_bins) {
  BinningMap map;
  map.max_bins = max_bins;
  for (const auto& f : j) {
    FeatureBins fb;
    fb.cuts = f.at("cuts").get<std::vector<double>>();
    fb.lo = f.at("lo").get<double>();
    fb.hi = f.at("hi").get<double>();
    fb.population = f.at("population").get<std::vector<std::size_t>>();
    for (std::size_t i = 1; i < fb.cuts.size(); ++i) {
      if (!(fb.cuts[i] > fb.cuts[i - 1])) corrupt("bin edges not strictly increasing");
    }
    map.features.push_back(std::move(fb));
  }
  return map;
}

json tree_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.count});
  }
  return nodes;
}

RegressionTree tree_from(const json& j) {
  RegressionTree tree;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at(0).get<int>();
    node.threshold = n.at(1).get<BinIndex>();
    node.left = n.at(2).get<int>();
    node.right = n.at(3).get<int>();
    node.value = n.at(4).get<double>();
    node.count = n.at(5).get<double>();
    tree.nodes.push_back(node);
  }
  const auto size = static_cast<int>(tree.nodes.size());
  if (size == 0) corrupt("empty tree");
  for (const auto& n : tree.nodes) {
    if (!n.leaf() && (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size)) corrupt("bad tree links");
  }
  return tree;
}

json config_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"max_rounds", c.max_rounds},
          {"early_stop_tol", c.early_stop_tol},
          {"early_stop_patience", c.early_stop_patience},
          {"min_samples_split", c.min_samples_split},
          {"min_samples_leaf", c.min_samples_leaf},
          {"main_depth", c.main_depth},
          {"pair_depth", c.pair_depth},
          {"max_bins", c.max_bins},
          {"pair_bins", c.pair_bins},
          {"interactions", c.interactions.to_string()},
          {"bagging_count", c.bagging_count},
          {"seed", c.seed}};
}

TrainConfig config_from(const json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.max_rounds = j.at("max_rounds").get<std::size_t>();
  c.early_stop_tol = j.at("early_stop_tol").get<double>();
  c.early_stop_patience = j.at("early_stop_patience").get<std::size_t>();
  c.min_samples_split = j.at("min_samples_split").get<std::size_t>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
  c.main_depth = j.at("main_depth").get<int>();
  c.pair_depth = j.at("pair_depth").get<int>();
  c.max_bins = j.at("max_bins").get<std::size_t>();
  c.pair_bins = j.at("pair_bins").get<std::size_t>();
  c.interactions = InteractionBudget::parse(j.at("interactions").get<std::string>());
  c.bagging_count = j.at("bagging_count").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

void glassbox_to(json& out, const GlassBoxModel& m) {
  out["intercept"] = m.intercept;
  out["bin_edges"] = bins_json(m.bins);
  json shapes = json::array();
  for (const auto& s : m.shapes) shapes.push_back({{"feature", s.feature}, {"values", s.values}});
  out["shape_functions"] = shapes;
  json pairs = json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back({{"first", p.first}, {"second", p.second}, {"rows", p.rows}, {"cols", p.cols}, {"values", p.values}});
  }
  out["pair_terms"] = pairs;
  json coarse = json::array();
  for (const auto& c : m.pair_binning) coarse.push_back({{"map", c.map}, {"count", c.count}});
  out["pair_binning"] = coarse;
  out["metadata"]["train_config"] = config_json(m.config);
  out["metadata"]["training"] = {{"main_rounds", m.summary.main_rounds},
                                 {"pair_rounds", m.summary.pair_rounds},
                                 {"main_validation", m.summary.main_validation},
                                 {"pair_validation", m.summary.pair_validation}};
}

GlassBoxModel glassbox_from(const json& j) {
  GlassBoxModel m;
  m.config = config_from(j.at("metadata").at("train_config"));
  const auto& tr = j.at("metadata").at("training");
  m.summary.main_rounds = tr.at("main_rounds").get<std::size_t>();
  m.summary.pair_rounds = tr.at("pair_rounds").get<std::size_t>();
  m.summary.main_validation = tr.at("main_validation").get<std::vector<double>>();
  m.summary.pair_validation = tr.at("pair_validation").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  m.bins = bins_from(j.at("bin_edges"), m.config.max_bins);
  for (const auto& s : j.at("shape_functions")) {
    m.shapes.push_back({s.at("feature").get<std::size_t>(), s.at("values").get<std::vector<double>>()});
  }
  for (const auto& c : j.at("pair_binning")) {
    m.pair_binning.push_back({c.at("map").get<std::vector<BinIndex>>(), c.at("count").get<std::size_t>()});
  }
  for (const auto& p : j.at("pair_terms")) {
    PairShapeFunction ps;
    ps.first = p.at("first").get<std::size_t>();
    ps.second = p.at("second").get<std::size_t>();
    ps.rows = p.at("rows").get<std::size_t>();
    ps.cols = p.at("cols").get<std::size_t>();
    ps.values = p.at("values").get<std::vector<double>>();
    m.pairs.push_back(std::move(ps));
  }
  const std::size_t n = m.bins.size();
  if (m.shapes.size() != n || m.pair_binning.size() != n) corrupt("term count does not match feature count");
  for (std::size_t f = 0; f < n; ++f) {
    if (m.shapes[f].feature != f || m.shapes[f].values.size() != m.bins.features[f].bin_count()) {
      corrupt("shape function size mismatch");
    }
    if (m.pair_binning[f].map.size() != m.bins.features[f].bin_count()) corrupt("pair binning size mismatch");
  }
  for (const auto& p : m.pairs) {
    if (p.first >= p.second || p.second >= n || p.rows != m.pair_binning[p.first].count ||
        p.cols != m.pair_binning[p.second].count || p.values.size() != p.rows * p.cols) {
      corrupt("pair term size mismatch");
    }
  }
  return m;
}

json payload_of(const ModelFile& file) {
  json out;
  out["format_version"] = kModelFormatVersion;
  out["model_kind"] = model_kind(file.model);
  out["metadata"]["data"] = file.metadata;
  out["normalization"] = norm_json(model_norm(file.model));
  out["feature_names"] = model_feature_names(file.model);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GlassBoxModel>) {
          glassbox_to(out, m);
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          out["linear"] = {{"intercept", m.intercept}, {"weights", m.weights}, {"rank", m.rank},
                           {"rank_deficient", m.rank_deficient}};
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          out["bin_edges"] = bins_json(m.bins);
          out["tree"] = {{"max_bins", m.bins.max_bins}, {"nodes", tree_json(m.tree)}};
        } else {
          out["persistence"] = {{"latest_lag", m.latest_lag}};
        }
      },
      file.model);
  return out;
}

ModelFile model_from(const json& j) {
  ModelFile file;
  file.metadata = j.at("metadata").at("data").get<std::map<std::string, std::string>>();
  const auto names = j.at("feature_names").get<std::vector<std::string>>();
  const auto norm = norm_from(j.at("normalization"));
  if (norm && norm->features.size() != names.size()) corrupt("normalization size mismatch");
  const auto kind = j.at("model_kind").get<std::string>();
  if (kind == "windebm") {
    GlassBoxModel m = glassbox_from(j);
    if (names.size() != m.feature_count()) corrupt("feature name count mismatch");
    m.feature_names = names;
    m.norm = norm;
    file.model = std::move(m);
  } else if (kind == "lr") {
    LinearModel m;
    const auto& l = j.at("linear");
    m.intercept = l.at("intercept").get<double>();
    m.weights = l.at("weights").get<std::vector<double>>();
    m.rank = l.at("rank").get<std::size_t>();
    m.rank_deficient = l.at("rank_deficient").get<bool>();
    if (m.weights.size() != names.size()) corrupt("weight count mismatch");
    m.feature_names = names;
    m.norm = norm;
    file.model = std::move(m);
  } else if (kind == "rt") {
    TreeModel m;
    m.bins = bins_from(j.at("bin_edges"), j.at("tree").at("max_bins").get<std::size_t>());
    m.tree = tree_from(j.at("tree").at("nodes"));
    if (m.bins.size() != names.size() || (m.tree.nodes.size() > 1 && m.tree.max_feature_index() >= names.size())) {
      corrupt("tree feature mismatch");
    }
    m.feature_names = names;
    m.norm = norm;
    file.model = std::move(m);
  } else if (kind == "pm") {
    PersistenceModel m;
    m.latest_lag = j.at("persistence").at("latest_lag").get<std::size_t>();
    if (m.latest_lag >= names.size()) corrupt("lag column out of range");
    m.feature_names = names;
    m.norm = norm;
    file.model = std::move(m);
  } else {
    corrupt("unknown model kind '" + kind + "'");
  }
  return file;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string model_kind(const AnyModel& model) {
  static const char* kinds[] = {"windebm", "lr", "rt", "pm"};
  return kinds[model.index()];
}

const std::vector<std::string>& model_feature_names(const AnyModel& model) {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.feature_names; }, model);
}

const std::optional<NormParams>& model_norm(const AnyModel& model) {
  return std::visit([](const auto& m) -> const std::optional<NormParams>& { return m.norm; }, model);
}

Predictor make_predictor(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> Predictor {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GlassBoxModel>) {
          return [&m](const Matrix& X) { return predict(m, X); };
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          return [&m](const Matrix& X) { return predict_lr(m, X); };
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          return [&m](const Matrix& X) { return predict_rt(m, X); };
        } else {
          return [&m](const Matrix& X) { return persistence_forecast(m, X); };
        }
      },
      model);
}

std::string serialize_model(const ModelFile& file) {
  json doc = payload_of(file);
  doc["checksum"] = fnv1a_hex(doc.dump());
  return doc.dump(1) + "\n";
}

ModelFile parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    corrupt(e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
      corrupt("missing format_version");
    }
    const int version = doc["format_version"].get<int>();
    if (version > kModelFormatVersion || version < 1) {
      throw ModelError("unsupported model format version " + std::to_string(version) + " (this build reads version " +
                       std::to_string(kModelFormatVersion) + ")");
    }
    if (!doc.contains("checksum") || !doc["checksum"].is_string()) corrupt("missing checksum");
    const std::string stored = doc["checksum"].get<std::string>();
    doc.erase("checksum");
    if (fnv1a_hex(doc.dump()) != stored) throw ModelError("model file checksum failure");
    return model_from(doc);
  } catch (const json::exception& e) {
    corrupt(e.what());
  } catch (const ConfigError& e) {
    corrupt(e.what());
  }
}

void save_model(const ModelFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << serialize_model(file);
  if (!out) throw ModelError("failed writing model file '" + path + "'");
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

void save_model(const GlassBoxModel& model, const std::string& path) { save_model(ModelFile{model, {}}, path); }

GlassBoxModel load_glassbox(const std::string& path) {
  ModelFile file = load_model(path);
  if (!std::holds_alternative<GlassBoxModel>(file.model)) {
    throw ModelError("model file holds a '" + model_kind(file.model) + "' model, not windebm");
  }
  return std::get<GlassBoxModel>(std::move(file.model));
}

}  // namespace windebm
