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

#include "windebm/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "windebm/error.hpp"

namespace windebm {
namespace {

void check_pair(std::span<const double> forecast, std::span<const double> actual) {
  if (forecast.size() != actual.size()) {
    throw DataError("length mismatch: " + std::to_string(forecast.size()) + " forecasts vs " +
                    std::to_string(actual.size()) + " actuals");
  }
  if (actual.empty()) throw DataError("empty input");
}

double sum_squared_error(std::span<const double> forecast, std::span<const double> actual) {
  double sse = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = forecast[i] - actual[i];
    sse += e * e;
  }
  return sse;
}

}  // namespace

double nrmse(std::span<const double> forecast, std::span<const double> actual) {
  check_pair(forecast, actual);
  return std::sqrt(sum_squared_error(forecast, actual) / static_cast<double>(actual.size()));
}

double nmae(std::span<const double> forecast, std::span<const double> actual) {
  check_pair(forecast, actual);
  double sae = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) sae += std::abs(forecast[i] - actual[i]);
  return sae / static_cast<double>(actual.size());
}

double r2(std::span<const double> forecast, std::span<const double> actual) {
  check_pair(forecast, actual);
  double mean = 0.0;
  for (double a : actual) mean += a;
  mean /= static_cast<double>(actual.size());
  double sst = 0.0;
  for (double a : actual) sst += (a - mean) * (a - mean);
  if (sst == 0.0) throw DataError("zero variance in actuals; R^2 undefined");
  return 1.0 - sum_squared_error(forecast, actual) / sst;
}

EvalReport evaluate(std::span<const double> forecast, std::span<const double> actual) {
  EvalReport report;
  report.nrmse = nrmse(forecast, actual);
  report.nmae = nmae(forecast, actual);
  report.r2 = r2(forecast, actual);
  report.m = actual.size();
  double mean = 0.0;
  for (double a : actual) mean += a;
  report.mean_actual = mean / static_cast<double>(actual.size());
  return report;
}

std::string EvalReport::to_record() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "nrmse=%.17g,nmae=%.17g,r2=%.17g,m=%zu,mean_actual=%.17g", nrmse, nmae, r2, m,
                mean_actual);
  return buf;
}

}  // namespace windebm
