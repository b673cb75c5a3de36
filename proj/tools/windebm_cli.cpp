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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "windebm/app.hpp"
#include "windebm/error.hpp"

namespace {

using namespace windebm::app;

struct CommonArgs {
  std::vector<std::string> configs;
  std::vector<std::string> overrides;
  std::string data;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.configs, "INI config file (repeatable; later files win)");
  cmd->add_option("-s,--set", args.overrides, "override a config key, e.g. train.learning_rate=0.002");
  cmd->add_option("--data", args.data, "input CSV (same as data.path)");
  cmd->add_option("-o,--out", args.out, "output directory (same as output.dir)");
}

KeyValues merged_keys(const std::vector<std::string>& files, const CommonArgs& args) {
  KeyValues kv;
  for (const auto& f : files) {
    for (const auto& [k, v] : read_config_file(f)) kv[k] = v;
  }
  for (const auto& o : args.overrides) apply_override(kv, o);
  if (!args.data.empty()) kv["data.path"] = args.data;
  if (!args.out.empty()) kv["output.dir"] = args.out;
  return kv;
}

RunConfig run_config(const CommonArgs& args) { return make_run_config(merged_keys(args.configs, args)); }

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const windebm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const windebm::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataFailure;
  } catch (const windebm::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kModelFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WindEBM: glass-box wind power forecasting"};
  app.require_subcommand(1);

  CommonArgs train_args;
  std::string train_kind_name;
  std::int64_t train_seed = -1;
  std::int64_t train_horizon = -1;
  auto* train = app.add_subcommand("train", "fit a model and write model.json");
  add_common(train, train_args);
  train->add_option("--model-kind", train_kind_name, "windebm, windebm-no-interactions, lr, rt or pm");
  train->add_option("--seed", train_seed, "random seed");
  train->add_option("--horizon", train_horizon, "forecast horizon in steps (lag mode)");

  CommonArgs eval_args;
  std::string eval_model, eval_range = "test", eval_forecasts;
  auto* evaluate = app.add_subcommand("evaluate", "score a model, or a forecast,actual CSV");
  add_common(evaluate, eval_args);
  evaluate->add_option("-m,--model", eval_model, "model file");
  evaluate->add_option("--range", eval_range, "train, val, test or all")->capture_default_str();
  evaluate->add_option("--forecasts", eval_forecasts, "CSV with forecast and actual columns");

  CommonArgs pred_args;
  std::string pred_model, pred_range = "test";
  auto* predict = app.add_subcommand("predict", "write forecasts.csv");
  add_common(predict, pred_args);
  predict->add_option("-m,--model", pred_model, "model file")->required();
  predict->add_option("--range", pred_range, "train, val, test or all")->capture_default_str();

  CommonArgs expl_args;
  std::string expl_model, expl_mode, expl_arg;
  bool expl_denorm = false;
  auto* explain = app.add_subcommand("explain", "global, local ROW, shape F, heatmap A,B, pdp F, pfi, consistency");
  add_common(explain, expl_args);
  explain->add_option("mode", expl_mode, "explanation mode")->required();
  explain->add_option("argument", expl_arg, "feature name, pair or row index");
  explain->add_option("-m,--model", expl_model, "model file")->required();
  explain->add_flag("--denormalize", expl_denorm, "report values in original units");

  CommonArgs bench_args;
  std::int64_t bench_threads = -1, bench_repeats = -1;
  auto* benchmark = app.add_subcommand("benchmark", "compare all models; one --config per dataset");
  add_common(benchmark, bench_args);
  benchmark->add_option("--threads", bench_threads, "worker threads");
  benchmark->add_option("--repeats", bench_repeats, "runs per model (seeds seed..seed+n-1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*train) {
    return guarded([&] {
      if (!train_kind_name.empty()) train_args.overrides.push_back("model.kind=" + train_kind_name);
      if (train_seed >= 0) train_args.overrides.push_back("train.seed=" + std::to_string(train_seed));
      if (train_horizon >= 0) train_args.overrides.push_back("features.horizon_steps=" + std::to_string(train_horizon));
      return cmd_train(run_config(train_args), std::cout);
    });
  }
  if (*evaluate) {
    return guarded([&] {
      if (!eval_forecasts.empty()) {
        const RunConfig c = run_config(eval_args);
        return cmd_evaluate_pairs(eval_forecasts, c.output_dir, std::cout);
      }
      if (eval_model.empty()) throw windebm::ConfigError("evaluate needs --model or --forecasts");
      return cmd_evaluate(run_config(eval_args), eval_model, eval_range, std::cout);
    });
  }
  if (*predict) {
    return guarded([&] { return cmd_predict(run_config(pred_args), pred_model, pred_range, std::cout); });
  }
  if (*explain) {
    return guarded(
        [&] { return cmd_explain(run_config(expl_args), expl_model, expl_mode, expl_arg, expl_denorm, std::cout); });
  }
  return guarded([&] {
    if (bench_threads >= 0) bench_args.overrides.push_back("benchmark.threads=" + std::to_string(bench_threads));
    if (bench_repeats >= 0) bench_args.overrides.push_back("benchmark.repeats=" + std::to_string(bench_repeats));
    std::vector<RunConfig> configs;
    if (bench_args.configs.empty()) configs.push_back(run_config(bench_args));
    for (const auto& file : bench_args.configs) configs.push_back(make_run_config(merged_keys({file}, bench_args)));
    return cmd_benchmark(configs, std::cout);
  });
}
