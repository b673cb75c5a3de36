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
#include <span>
#include <string>

namespace windebm {

// Evaluation metrics over normalized forecasts. All of them reject empty or
// length-mismatched inputs with DataError.
double nrmse(std::span<const double> forecast, std::span<const double> actual);
double nmae(std::span<const double> forecast, std::span<const double> actual);
// Throws DataError("zero variance") for constant actuals.
double r2(std::span<const double> forecast, std::span<const double> actual);

struct EvalReport {
  double nrmse = 0.0;
  double nmae = 0.0;
  double r2 = 0.0;
  std::size_t m = 0;
  double mean_actual = 0.0;

  // "nrmse=...,nmae=...,r2=...,m=...,mean_actual=..."
  std::string to_record() const;
};

EvalReport evaluate(std::span<const double> forecast, std::span<const double> actual);

}  // namespace windebm
