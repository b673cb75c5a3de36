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

import math

import numpy as np
import pytest

import windebm


def synthetic(rows=3000, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(rows, 4))
    y = np.sin(2 * math.pi * X[:, 0]) + 0.5 * X[:, 1] + X[:, 2] * X[:, 3] + rng.normal(0, 0.05, rows)
    return X, y


@pytest.fixture(scope="module")
def model():
    X, y = synthetic()
    return windebm.train_glassbox(X, y, ["a", "b", "c", "d"], learning_rate=0.05, max_rounds=300, max_bins=64,
                                  pair_bins=8, seed=3)


def test_metrics_hand_case():
    assert windebm.nrmse([0.5, 0.5], [0.0, 1.0]) == 0.5
    assert windebm.nmae([0.5, 0.5], [0.0, 1.0]) == 0.5
    assert windebm.r2([0.5, 0.5], [0.0, 1.0]) == 0.0
    report = windebm.evaluate([0.1, 0.9], [0.1, 0.9])
    assert report["nrmse"] == 0.0 and report["r2"] == 1.0 and report["m"] == 2


def test_zero_variance_raises():
    with pytest.raises(windebm.DataError, match="zero variance"):
        windebm.r2([0.3, 0.3], [0.3, 0.3])


def test_lag_features_and_split():
    X, y = windebm.lag_features([1, 2, 3, 4, 5, 6], n_lags=2, horizon=1)
    assert X.tolist() == [[1, 2], [2, 3], [3, 4], [4, 5]]
    assert y.tolist() == [3, 4, 5, 6]
    split = windebm.chronological_split(100)
    assert split == {"train": (0, 80), "val": (80, 90), "test": (90, 100)}
    with pytest.raises(windebm.DataError):
        windebm.chronological_split(5)


def test_pearson():
    assert windebm.pearson_correlation([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)


def test_model_predicts_and_decomposes(model):
    X, y = synthetic(rows=500, seed=1)
    pred = np.asarray(model.predict(X))
    assert windebm.r2(pred.tolist(), y.tolist()) > 0.9
    intercept, terms, forecast = model.breakdown(X[0])
    assert intercept + sum(v for _, v in terms) == pytest.approx(forecast, abs=1e-12)
    assert forecast == pytest.approx(pred[0], abs=1e-12)
    assert len(model.pairs) == 6


def test_save_load_round_trip(model, tmp_path):
    X, _ = synthetic(rows=200, seed=2)
    path = str(tmp_path / "model.json")
    model.save(path)
    again = windebm.GlassBoxModel.load(path)
    assert again.predict(X) == model.predict(X)
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(windebm.ModelError, match="corrupt model file"):
        windebm.GlassBoxModel.load(str(tmp_path / "bad.json"))


def test_explanations(model):
    X, y = synthetic(rows=400, seed=4)
    scores = dict(windebm.global_importance(model, X))
    assert scores["a"] == max(scores.values())
    additive = windebm.train_glassbox(*synthetic(seed=5), ["a", "b", "c", "d"], learning_rate=0.05, max_rounds=100,
                                      max_bins=64, interactions="0")
    assert additive.pairs == []
    grid, curve = windebm.pdp(additive, X, "a")
    centers, values = additive.shape("a")
    assert grid == centers
    shift = curve[0] - values[0]
    assert np.allclose(np.asarray(curve) - shift, values, atol=1e-9)
    imp = windebm.pfi(model, X, y.tolist(), repeats=3, seed=1)
    assert imp[0] > imp[1] > 0
    with pytest.raises(windebm.ModelError, match="valid names"):
        model.shape("zz")


def test_baselines():
    X = np.linspace(0, 1, 20).reshape(-1, 1)
    y = 2 * X[:, 0] + 0.1
    lr = windebm.fit_ols(X, y)
    assert lr.weights[0] == pytest.approx(2.0)
    assert lr.intercept == pytest.approx(0.1)
    assert np.allclose(lr.predict(X), y, atol=1e-10)
    assert windebm.persistence_forecast(np.array([[0.1, 0.7]]), 1) == [0.7]
