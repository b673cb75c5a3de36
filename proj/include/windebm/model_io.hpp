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

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "windebm/baselines.hpp"
#include "windebm/explain.hpp"
#include "windebm/glassbox.hpp"

namespace windebm {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<GlassBoxModel, LinearModel, TreeModel, PersistenceModel>;

// A model plus free-form string metadata (feature construction, data
// schema) that the CLI needs to rebuild inputs for it.
struct ModelFile {
  AnyModel model;
  std::map<std::string, std::string> metadata;
};

// "windebm", "lr", "rt" or "pm".
std::string model_kind(const AnyModel& model);
const std::vector<std::string>& model_feature_names(const AnyModel& model);
const std::optional<NormParams>& model_norm(const AnyModel& model);
// The returned predictor references `model`, which must outlive it.
Predictor make_predictor(const AnyModel& model);

// Versioned JSON text with an FNV-1a checksum over the payload. Doubles are
// written in shortest round-trip form, so save/load is bit-exact.
std::string serialize_model(const ModelFile& file);
// Throws ModelError on malformed text, checksum mismatch, or a format
// version newer than kModelFormatVersion.
ModelFile parse_model(const std::string& text);

void save_model(const ModelFile& file, const std::string& path);
ModelFile load_model(const std::string& path);
void save_model(const GlassBoxModel& model, const std::string& path);
GlassBoxModel load_glassbox(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace windebm
