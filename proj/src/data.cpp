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

#include "windebm/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace windebm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_line(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::int64_t to_epoch(int y, int mo, int d, int h, int mi, double sec, const std::string& text) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 24 || mi < 0 || mi > 59 || sec < 0.0 || sec >= 61.0) {
    throw DataError("unparseable timestamp: '" + text + "'");
  }
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 +
         static_cast<std::int64_t>(std::floor(sec));
}

// HH:MM[:SS[.fff]] with an optional zone suffix; returns seconds of day and
// the zone offset in seconds.
bool parse_clock(std::string_view s, int& h, int& mi, double& sec, int& offset) {
  offset = 0;
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  const auto zone = s.find_first_of("+-", 1);
  if (zone != std::string_view::npos) {
    auto z = s.substr(zone + 1);
    const int sign = s[zone] == '-' ? -1 : 1;
    s = s.substr(0, zone);
    int zh = 0, zm = 0;
    if (z.size() == 5 && z[2] == ':') {
      if (!parse_int(z.substr(0, 2), zh) || !parse_int(z.substr(3, 2), zm)) return false;
    } else if (z.size() == 4) {
      if (!parse_int(z.substr(0, 2), zh) || !parse_int(z.substr(2, 2), zm)) return false;
    } else if (z.size() == 2) {
      if (!parse_int(z, zh)) return false;
    } else {
      return false;
    }
    offset = sign * (zh * 3600 + zm * 60);
  }
  const auto c1 = s.find(':');
  if (c1 == std::string_view::npos) return false;
  if (!parse_int(s.substr(0, c1), h)) return false;
  auto rest = s.substr(c1 + 1);
  const auto c2 = rest.find(':');
  sec = 0.0;
  if (c2 == std::string_view::npos) return parse_int(rest, mi);
  return parse_int(rest.substr(0, c2), mi) && parse_double(rest.substr(c2 + 1), sec);
}

std::int64_t parse_calendar(const std::string& text) {
  std::string_view s = text;
  std::string_view date = s;
  std::string_view clock;
  const auto sep = s.find_first_of("T ");
  if (sep != std::string_view::npos) {
    date = s.substr(0, sep);
    clock = trim(s.substr(sep + 1));
  }
  int y = 0, mo = 0, d = 0;
  if (date.size() == 8 && all_digits(date)) {
    // Compact YYYYMMDD date, e.g. "20120101 1:00".
    parse_int(date.substr(0, 4), y);
    parse_int(date.substr(4, 2), mo);
    parse_int(date.substr(6, 2), d);
  } else {
    const char ds = date.find('-') != std::string_view::npos ? '-' : '/';
    const auto p1 = date.find(ds);
    const auto p2 = p1 == std::string_view::npos ? p1 : date.find(ds, p1 + 1);
    if (p2 == std::string_view::npos || !parse_int(date.substr(0, p1), y) ||
        !parse_int(date.substr(p1 + 1, p2 - p1 - 1), mo) || !parse_int(date.substr(p2 + 1), d)) {
      throw DataError("unparseable timestamp: '" + text + "'");
    }
  }
  int h = 0, mi = 0, offset = 0;
  double sec = 0.0;
  if (!clock.empty() && !parse_clock(clock, h, mi, sec, offset)) {
    throw DataError("unparseable timestamp: '" + text + "'");
  }
  return to_epoch(y, mo, d, h, mi, sec, text) - offset;
}

}  // namespace

double ColumnScale::apply(double v) const {
  if (constant()) return 0.5;
  return std::clamp((v - min) / (max - min), 0.0, 1.0);
}

double ColumnScale::invert(double v) const {
  if (constant()) return min;
  return min + v * (max - min);
}

std::int64_t parse_timestamp(const std::string& raw, TimestampFormat format) {
  const std::string text{trim(raw)};
  if (text.empty()) throw DataError("unparseable timestamp: empty field");
  const bool numeric = std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E';
  });
  const bool looks_epoch = numeric && text.find('-', 1) == std::string::npos;
  if (format == TimestampFormat::kEpochSeconds || (format == TimestampFormat::kAuto && looks_epoch)) {
    double v = 0.0;
    if (!parse_double(text, v) || !std::isfinite(v)) {
      throw DataError("unparseable timestamp: '" + text + "'");
    }
    return static_cast<std::int64_t>(std::floor(v));
  }
  return parse_calendar(text);
}

TimeSeriesFrame parse_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
  const auto header = split_line(line, schema.delimiter);
  auto find_col = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw DataError("missing column '" + name + "'");
  };
  const std::size_t ts_col = find_col(schema.timestamp_column);
  const std::size_t target_col = find_col(schema.target_column);
  std::vector<std::size_t> exo_cols;
  for (const auto& name : schema.exogenous_columns) exo_cols.push_back(find_col(name));

  TimeSeriesFrame frame;
  frame.exogenous_names = schema.exogenous_columns;
  frame.exogenous.resize(exo_cols.size());
  std::size_t line_no = 1;
  std::vector<double> exo_values(exo_cols.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line, schema.delimiter);
    auto field = [&](std::size_t i) -> std::string_view { return i < fields.size() ? fields[i] : std::string_view{}; };
    std::int64_t ts = 0;
    try {
      ts = parse_timestamp(std::string(field(ts_col)), schema.timestamp_format);
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
    double target = 0.0;
    bool valid = parse_double(field(target_col), target) && std::isfinite(target);
    for (std::size_t k = 0; valid && k < exo_cols.size(); ++k) {
      valid = parse_double(field(exo_cols[k]), exo_values[k]) && std::isfinite(exo_values[k]);
    }
    if (!valid) {
      ++frame.dropped_rows;
      continue;
    }
    if (!frame.timestamps.empty() && ts <= frame.timestamps.back()) {
      throw DataError("non-monotone timestamps (line " + std::to_string(line_no) + ")");
    }
    frame.timestamps.push_back(ts);
    frame.target.push_back(target);
    for (std::size_t k = 0; k < exo_cols.size(); ++k) frame.exogenous[k].push_back(exo_values[k]);
  }
  if (frame.size() == 0) throw DataError("no valid data rows");
  return frame;
}

TimeSeriesFrame load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in, schema);
}

SupervisedMatrix build_lag_features(const TimeSeriesFrame& frame, std::size_t n_lags,
                                    std::size_t horizon_steps) {
  if (n_lags < 1 || horizon_steps < 1) throw DataError("n_lags and horizon_steps must be >= 1");
  const std::size_t len = frame.size();
  if (len <= n_lags + horizon_steps) {
    throw DataError("insufficient length: series of " + std::to_string(len) + " rows cannot provide " +
                    std::to_string(n_lags) + " lags at horizon " + std::to_string(horizon_steps));
  }
  const std::size_t rows = len - n_lags - horizon_steps + 1;
  SupervisedMatrix out;
  out.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n_lags));
  out.y.resize(static_cast<Eigen::Index>(rows));
  out.timestamps.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + n_lags - 1;
    for (std::size_t k = 0; k < n_lags; ++k) {
      out.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = frame.target[t + 1 + k - n_lags];
    }
    out.y(static_cast<Eigen::Index>(r)) = frame.target[t + horizon_steps];
    out.timestamps[r] = frame.timestamps[t + horizon_steps];
  }
  for (std::size_t k = 0; k < n_lags; ++k) out.feature_names.push_back("lag_" + std::to_string(n_lags - 1 - k));
  out.latest_lag = n_lags - 1;
  return out;
}

SupervisedMatrix build_exogenous_features(const TimeSeriesFrame& frame) {
  if (frame.exogenous.empty()) throw DataError("no exogenous columns");
  const auto rows = static_cast<Eigen::Index>(frame.size());
  SupervisedMatrix out;
  out.X.resize(rows, static_cast<Eigen::Index>(frame.exogenous.size()));
  for (std::size_t c = 0; c < frame.exogenous.size(); ++c) {
    out.X.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Vector>(frame.exogenous[c].data(), rows);
  }
  out.y = Eigen::Map<const Vector>(frame.target.data(), rows);
  out.feature_names = frame.exogenous_names;
  out.timestamps = frame.timestamps;
  return out;
}

NormParams fit_normalization(const SupervisedMatrix& matrix, RowRange fit_range) {
  if (fit_range.empty() || fit_range.end > matrix.rows()) throw DataError("empty or out-of-bounds fit range");
  const auto b = static_cast<Eigen::Index>(fit_range.begin);
  const auto n = static_cast<Eigen::Index>(fit_range.size());
  NormParams params;
  for (Eigen::Index c = 0; c < matrix.X.cols(); ++c) {
    const auto seg = matrix.X.col(c).segment(b, n);
    params.features.push_back({seg.minCoeff(), seg.maxCoeff()});
  }
  const auto yseg = matrix.y.segment(b, n);
  params.target = {yseg.minCoeff(), yseg.maxCoeff()};
  return params;
}

SupervisedMatrix apply_normalization(SupervisedMatrix matrix, const NormParams& params) {
  if (params.features.size() != matrix.cols()) throw DataError("normalization column count mismatch");
  for (Eigen::Index c = 0; c < matrix.X.cols(); ++c) {
    const auto& scale = params.features[static_cast<std::size_t>(c)];
    matrix.X.col(c) = matrix.X.col(c).unaryExpr([&](double v) { return scale.apply(v); });
  }
  matrix.y = matrix.y.unaryExpr([&](double v) { return params.target.apply(v); });
  matrix.norm = params;
  return matrix;
}

SupervisedMatrix normalize_fit_apply(const SupervisedMatrix& matrix, RowRange fit_range) {
  return apply_normalization(matrix, fit_normalization(matrix, fit_range));
}

DataSplit chronological_split(std::size_t rows, SplitFractions f) {
  if (!(f.train > 0.0 && f.val > 0.0 && f.test > 0.0) || std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be positive and sum to 1");
  }
  // The epsilon absorbs representation error such as 10 * 0.8 = 7.999...
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(rows) * f.train + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(rows) * f.val + 1e-9));
  DataSplit split;
  split.train = {0, n_train};
  split.val = {n_train, n_train + n_val};
  split.test = {n_train + n_val, rows};
  if (split.train.empty() || split.val.empty() || split.test.empty() || n_train + n_val > rows) {
    throw DataError("too few rows (" + std::to_string(rows) + ") to give every split range at least one row");
  }
  return split;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("pearson_correlation: length mismatch");
  if (a.size() < 2) throw DataError("pearson_correlation: need at least two points");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DataError("pearson_correlation: constant input, correlation undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> column_values(const Matrix& X, std::size_t col) {
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index r = 0; r < X.rows(); ++r) out[static_cast<std::size_t>(r)] = X(r, static_cast<Eigen::Index>(col));
  return out;
}

}  // namespace windebm
