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

#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "windebm/data.hpp"
#include "windebm/error.hpp"

using namespace windebm;

namespace {

TimeSeriesFrame parse(const std::string& text, CsvSchema schema = {}) {
  std::istringstream in(text);
  return parse_csv(in, schema);
}

TimeSeriesFrame series(std::vector<double> values) {
  TimeSeriesFrame f;
  for (std::size_t i = 0; i < values.size(); ++i) f.timestamps.push_back(static_cast<std::int64_t>(i));
  f.target = std::move(values);
  return f;
}

SupervisedMatrix single_column(std::vector<double> values) {
  SupervisedMatrix m;
  m.X.resize(static_cast<Eigen::Index>(values.size()), 1);
  m.y.resize(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m.X(static_cast<Eigen::Index>(i), 0) = values[i];
    m.y(static_cast<Eigen::Index>(i)) = values[i];
  }
  m.feature_names = {"v"};
  return m;
}

}  // namespace

TEST_CASE("csv ingestion") {
  SUBCASE("well formed rows") {
    const auto f = parse("timestamp,power\n0,0.1\n3600,0.2\n7200,0.3\n");
    CHECK(f.size() == 3);
    CHECK(f.dropped_rows == 0);
    CHECK(f.target[2] == doctest::Approx(0.3));
  }
  SUBCASE("missing target value is dropped") {
    const auto f = parse("timestamp,power\n0,0.1\n3600,nan\n7200,0.3\n");
    CHECK(f.size() == 2);
    CHECK(f.dropped_rows == 1);
  }
  SUBCASE("empty field is dropped") {
    CsvSchema s;
    s.exogenous_columns = {"u"};
    const auto f = parse("timestamp,power,u\n0,0.1,\n1,0.2,3\n", s);
    CHECK(f.size() == 1);
    CHECK(f.dropped_rows == 1);
  }
  SUBCASE("duplicated timestamp") {
    CHECK_THROWS_WITH_AS(parse("timestamp,power\n0,0.1\n0,0.2\n"), doctest::Contains("non-monotone timestamps"),
                         DataError);
  }
  SUBCASE("missing column") {
    CHECK_THROWS_WITH_AS(parse("time,power\n0,0.1\n"), doctest::Contains("missing column"), DataError);
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(parse(""), DataError); }
  SUBCASE("custom delimiter and exogenous columns") {
    CsvSchema s;
    s.delimiter = ';';
    s.target_column = "TARGETVAR";
    s.exogenous_columns = {"U10", "V10"};
    const auto f = parse("TIMESTAMP;TARGETVAR;U10;V10\n20120101 1:00;0.5;1.5;-2\n20120101 2:00;0.6;1;0\n",
                         [&] {
                           auto t = s;
                           t.timestamp_column = "TIMESTAMP";
                           return t;
                         }());
    REQUIRE(f.size() == 2);
    CHECK(f.exogenous[1][0] == -2.0);
    CHECK(f.timestamps[1] - f.timestamps[0] == 3600);
  }
}

TEST_CASE("timestamp parsing") {
  CHECK(parse_timestamp("3600", TimestampFormat::kAuto) == 3600);
  CHECK(parse_timestamp("1970-01-01T01:00:00Z", TimestampFormat::kAuto) == 3600);
  CHECK(parse_timestamp("1970-01-01 01:00", TimestampFormat::kIso8601) == 3600);
  CHECK(parse_timestamp("1970-01-01T02:00:00+01:00", TimestampFormat::kAuto) == 3600);
  CHECK(parse_timestamp("2012-01-01T00:00:00Z", TimestampFormat::kAuto) == 1325376000);
  CHECK(parse_timestamp("20120101 1:00", TimestampFormat::kAuto) == 1325376000 + 3600);
  CHECK_THROWS_AS(parse_timestamp("yesterday", TimestampFormat::kAuto), DataError);
  CHECK_THROWS_AS(parse_timestamp("2012-13-01", TimestampFormat::kIso8601), DataError);
}

TEST_CASE("lag features") {
  SUBCASE("enumeration") {
    const auto m = build_lag_features(series({1, 2, 3, 4, 5, 6}), 2, 1);
    REQUIRE(m.rows() == 4);
    for (int r = 0; r < 4; ++r) {
      CHECK(m.X(r, 0) == r + 1);
      CHECK(m.X(r, 1) == r + 2);
      CHECK(m.y(r) == r + 3);
    }
    CHECK(m.feature_names == std::vector<std::string>{"lag_1", "lag_0"});
    CHECK(m.latest_lag == 1u);
  }
  SUBCASE("too short") { CHECK_THROWS_AS(build_lag_features(series({1, 2, 3}), 3, 1), DataError); }
  SUBCASE("single lag") {
    const auto m = build_lag_features(series({1, 2, 3}), 1, 1);
    CHECK(m.cols() == 1);
    CHECK(m.rows() == 2);
    CHECK(m.X(1, 0) == 2);
    CHECK(m.y(1) == 3);
  }
  SUBCASE("reconstruction on random series") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(50 + rng() % 50);
      for (auto& x : v) x = u(rng);
      const std::size_t lags = 1 + rng() % 10, h = 1 + rng() % 8;
      const auto m = build_lag_features(series(v), lags, h);
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const std::size_t t = r + lags - 1;
        CHECK(m.y(static_cast<Eigen::Index>(r)) == v[t + h]);
        CHECK(m.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*m.latest_lag)) == v[t]);
        CHECK(m.timestamps[r] == static_cast<std::int64_t>(t + h));
      }
    }
  }
}

TEST_CASE("exogenous features") {
  TimeSeriesFrame f = series(std::vector<double>(100, 0.5));
  f.exogenous_names = {"a", "b", "c", "d"};
  f.exogenous.assign(4, std::vector<double>(100, 1.0));
  const auto m = build_exogenous_features(f);
  CHECK(m.rows() == 100);
  CHECK(m.cols() == 4);
  CHECK_FALSE(m.latest_lag.has_value());

  TimeSeriesFrame one = series({1, 2});
  one.exogenous_names = {"a"};
  one.exogenous = {{3, 4}};
  CHECK(build_exogenous_features(one).cols() == 1);
  CHECK_THROWS_AS(build_exogenous_features(series({1, 2})), DataError);
}

TEST_CASE("min-max normalization") {
  SUBCASE("direct formula") {
    const auto m = normalize_fit_apply(single_column({0, 5, 10}), {0, 3});
    CHECK(m.X(0, 0) == 0.0);
    CHECK(m.X(1, 0) == 0.5);
    CHECK(m.X(2, 0) == 1.0);
  }
  SUBCASE("constant column") {
    const auto m = normalize_fit_apply(single_column({3, 3, 3}), {0, 3});
    for (int i = 0; i < 3; ++i) CHECK(m.X(i, 0) == 0.5);
  }
  SUBCASE("clamped outside the fitted range") {
    const auto m = normalize_fit_apply(single_column({0, 10, 12, -1}), {0, 2});
    CHECK(m.X(2, 0) == 1.0);
    CHECK(m.X(3, 0) == 0.0);
  }
  SUBCASE("invert round trip") {
    const ColumnScale s{2.0, 6.0};
    CHECK(s.invert(s.apply(3.0)) == doctest::Approx(3.0));
  }
  SUBCASE("idempotent under fixed parameters") {
    const auto raw = windebm::testing::additive_dataset(200, 3, 5);
    const NormParams p = fit_normalization(raw, {0, 150});
    const auto once = apply_normalization(raw, p);
    // Re-applying the same parameters must not move anything already mapped
    // into [0,1] by them, and refitting on normalized data is the identity.
    const auto refit = normalize_fit_apply(once, {0, 150});
    CHECK((refit.X - once.X).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((refit.y - once.y).cwiseAbs().maxCoeff() <= 1e-15);
    const auto twice = apply_normalization(once, fit_normalization(once, {0, 150}));
    CHECK(twice.X == refit.X);
  }
}

TEST_CASE("chronological split") {
  auto check_partition = [](std::size_t m, const DataSplit& s) {
    CHECK(s.train.begin == 0);
    CHECK(s.train.end == s.val.begin);
    CHECK(s.val.end == s.test.begin);
    CHECK(s.test.end == m);
  };
  const auto s100 = chronological_split(100);
  CHECK(s100.train == RowRange{0, 80});
  CHECK(s100.val == RowRange{80, 90});
  CHECK(s100.test == RowRange{90, 100});
  const auto s10 = chronological_split(10);
  CHECK(s10.train.size() == 8);
  CHECK(s10.val.size() == 1);
  CHECK(s10.test.size() == 1);
  CHECK_THROWS_AS(chronological_split(5), DataError);
  CHECK_THROWS_AS(chronological_split(100, {0.8, 0.3, 0.1}), ConfigError);
  for (std::size_t m = 10; m < 400; m += 7) check_partition(m, chronological_split(m));
  check_partition(1000, chronological_split(1000, {0.6, 0.25, 0.15}));
}

TEST_CASE("pearson correlation") {
  std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  CHECK(pearson_correlation(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson_correlation(a, b) == doctest::Approx(-1.0).epsilon(1e-15));
  std::vector<double> c{1, 2, 3, 4}, d{1, 2, 2, 4};
  CHECK(pearson_correlation(c, d) == doctest::Approx(oracle::pearson(c, d)).epsilon(1e-14));
  // Deviations (-1.5,-0.5,0.5,1.5) and (-1.25,-0.25,-0.25,1.75): 4.5 / sqrt(5 * 4.75).
  CHECK(pearson_correlation(c, d) == doctest::Approx(4.5 / std::sqrt(23.75)).epsilon(1e-14));
  std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(pearson_correlation(a, flat), DataError);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(30), y(30), z(30);
    for (std::size_t i = 0; i < 30; ++i) {
      x[i] = n(rng);
      y[i] = 0.5 * x[i] + n(rng);
    }
    const double scale = std::exp(n(rng)), shift = 10.0 * n(rng);
    for (std::size_t i = 0; i < 30; ++i) z[i] = scale * y[i] + shift;
    const double r = pearson_correlation(x, y);
    CHECK(r == doctest::Approx(pearson_correlation(y, x)).epsilon(1e-14));
    CHECK(r == doctest::Approx(pearson_correlation(x, z)).epsilon(1e-12));
    CHECK(r == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-12));
  }
}
