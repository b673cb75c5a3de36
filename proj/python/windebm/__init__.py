# Copyright 2026 The WindEBM Authors. All Rights Reserved.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Glass-box additive boosting for wind power forecasting."""

from ._core import (
    ConfigError,
    DataError,
    GlassBoxModel,
    LinearModel,
    ModelError,
    WindEBMError,
    chronological_split,
    evaluate,
    fit_ols,
    global_importance,
    lag_features,
    nmae,
    nrmse,
    pdp,
    pearson_correlation,
    persistence_forecast,
    pfi,
    r2,
    train_glassbox,
)

__all__ = [
    "ConfigError",
    "DataError",
    "GlassBoxModel",
    "LinearModel",
    "ModelError",
    "WindEBMError",
    "chronological_split",
    "evaluate",
    "fit_ols",
    "global_importance",
    "lag_features",
    "nmae",
    "nrmse",
    "pdp",
    "pearson_correlation",
    "persistence_forecast",
    "pfi",
    "r2",
    "train_glassbox",
]
