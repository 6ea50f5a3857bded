#include "actorcast/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "actorcast/csv.hpp"
#include "actorcast/errors.hpp"

namespace actorcast {

namespace {

constexpr RollingStat kStats[] = {RollingStat::kMean, RollingStat::kStd, RollingStat::kMax};

void append_history_features(std::vector<std::pair<std::string, Series>>& cols, const std::string& name,
                             std::span<const double> x) {
  for (int k = 1; k <= kMaxLag; ++k) cols.emplace_back(name + "_lag" + std::to_string(k), lag(x, k));
  for (RollingStat stat : kStats) {
    for (int w : kRollingWindows) {
      cols.emplace_back(name + "_rolling_" + std::string(rolling_stat_name(stat)) + std::to_string(w),
                        rolling_stat(x, w, stat));
    }
  }
}

}  // namespace

Series lag(std::span<const double> x, int k) {
  if (k < 1) throw std::invalid_argument("lag: k must be >= 1");
  Series out(x.size(), kUndefined);
  for (size_t t = static_cast<size_t>(k); t < x.size(); ++t) out[t] = x[t - static_cast<size_t>(k)];
  return out;
}

std::string_view rolling_stat_name(RollingStat stat) {
  switch (stat) {
    case RollingStat::kMean: return "mean";
    case RollingStat::kStd: return "std";
    case RollingStat::kMax: return "max";
  }
  return "?";
}

Series rolling_stat(std::span<const double> x, int window, RollingStat stat) {
  if (window < 2) throw std::invalid_argument("rolling_stat: window must be >= 2");
  const size_t w = static_cast<size_t>(window);
  Series out(x.size(), kUndefined);
  for (size_t t = w - 1; t < x.size(); ++t) {
    const auto win = x.subspan(t + 1 - w, w);
    double mean = 0.0;
    for (double v : win) mean += v;
    mean /= static_cast<double>(w);
    switch (stat) {
      case RollingStat::kMean:
        out[t] = mean;
        break;
      case RollingStat::kStd: {
        double ss = 0.0;
        for (double v : win) ss += (v - mean) * (v - mean);
        out[t] = std::sqrt(ss / static_cast<double>(w - 1));
        break;
      }
      case RollingStat::kMax:
        out[t] = *std::max_element(win.begin(), win.end());
        break;
    }
  }
  return out;
}

Series zscore7(std::span<const double> x) {
  const Series mean = rolling_stat(x, 7, RollingStat::kMean);
  const Series sd = rolling_stat(x, 7, RollingStat::kStd);
  Series out(x.size(), kUndefined);
  for (size_t t = 0; t < x.size(); ++t) {
    if (!is_defined(mean[t])) continue;
    out[t] = sd[t] < 1e-12 ? 0.0 : (x[t] - mean[t]) / sd[t];
  }
  return out;
}

TargetSeries make_target(std::span<const double> tt) {
  if (tt.size() < 4) throw DataError("insufficient history");
  const size_t n = tt.size();
  TargetSeries out;
  out.delta.assign(n, kUndefined);
  out.smoothed_delta.assign(n, kUndefined);
  out.target.assign(n, kUndefined);
  out.base.assign(tt.begin(), tt.end());
  out.actual_next.assign(n, kUndefined);
  for (size_t t = 1; t < n; ++t) out.delta[t] = tt[t] - tt[t - 1];
  for (size_t t = 3; t < n; ++t) {
    out.smoothed_delta[t] = (out.delta[t - 2] + out.delta[t - 1] + out.delta[t]) / 3.0;
  }
  for (size_t t = 0; t + 1 < n; ++t) {
    out.target[t] = out.smoothed_delta[t + 1];
    out.actual_next[t] = tt[t + 1];
  }
  return out;
}

Reconstruction reconstruct(std::span<const double> base, std::span<const double> delta_hat) {
  if (base.size() != delta_hat.size()) throw std::invalid_argument("reconstruct: length mismatch");
  Reconstruction out;
  out.tt.resize(base.size());
  for (size_t i = 0; i < base.size(); ++i) {
    double v = base[i] + delta_hat[i];
    if (v < 0.0) {
      v = 0.0;
      ++out.clamped;
    }
    out.tt[i] = v;
  }
  return out;
}

std::string_view feature_set_name(FeatureSet set) {
  return set == FeatureSet::kBaseline ? "baseline" : "actor";
}

std::vector<std::pair<std::string, Series>> feature_columns(const SeriesPanel& panel, FeatureSet set,
                                                            const FeatureOptions& options) {
  std::vector<std::pair<std::string, Series>> cols;
  append_history_features(cols, "TT", panel.tt);
  cols.emplace_back("TT_zscore7", zscore7(panel.tt));
  cols.emplace_back("TT_peak", options.peak_mode == PeakMode::kPaper
                                   ? peak_indicator(panel.tt, options.peaks)
                                   : causal_peak_indicator(panel.tt, options.peaks));
  if (set == FeatureSet::kActorEnriched) {
    for (const auto& [name, column] : panel.actor_columns()) {
      cols.emplace_back(name, *column);
      append_history_features(cols, name, *column);
    }
  }
  return cols;
}

std::vector<std::string> lookahead_features(const FeatureOptions& options) {
  if (options.peak_mode == PeakMode::kPaper) return {"TT_peak"};
  return {};
}

size_t FeatureMatrix::find_feature(std::string_view name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  return it == feature_names.end() ? std::string::npos : static_cast<size_t>(it - feature_names.begin());
}

FeatureMatrix FeatureMatrix::slice(size_t begin, size_t end) const {
  if (begin > end || end > rows()) throw std::out_of_range("FeatureMatrix::slice: bad range");
  FeatureMatrix out;
  out.set = set;
  out.feature_names = feature_names;
  out.origin_dates.assign(origin_dates.begin() + static_cast<long>(begin), origin_dates.begin() + static_cast<long>(end));
  out.x.assign(x.begin() + static_cast<long>(begin * cols()), x.begin() + static_cast<long>(end * cols()));
  out.y.assign(y.begin() + static_cast<long>(begin), y.begin() + static_cast<long>(end));
  out.base.assign(base.begin() + static_cast<long>(begin), base.begin() + static_cast<long>(end));
  out.actual_next_tt.assign(actual_next_tt.begin() + static_cast<long>(begin),
                            actual_next_tt.begin() + static_cast<long>(end));
  return out;
}

FeatureMatrix build_feature_matrix(const SeriesPanel& panel, FeatureSet set, const FeatureOptions& options) {
  const size_t n = panel.size();
  if (n <= static_cast<size_t>(kMaxLag) + 1) {
    throw DataError("panel too short for feature engineering: " + std::to_string(n) + " days, need more than " +
                    std::to_string(kMaxLag + 1));
  }
  const auto cols = feature_columns(panel, set, options);
  const TargetSeries target = make_target(panel.tt);

  // first origin at which every column and the target are defined
  size_t first = 0;
  for (size_t t = 0; t < n; ++t) {
    bool ok = is_defined(target.target[t]);
    for (const auto& [name, col] : cols) ok = ok && is_defined(col[t]);
    if (ok) {
      first = t;
      break;
    }
    first = n;
  }
  const size_t last = n - 1;  // exclusive: the final day has no next-day target
  if (first >= last) throw DataError("panel too short: no row has every feature defined");

  FeatureMatrix m;
  m.set = set;
  for (const auto& [name, col] : cols) m.feature_names.push_back(name);
  m.x.reserve((last - first) * cols.size());
  for (size_t t = first; t < last; ++t) {
    m.origin_dates.push_back(panel.calendar.dates[t]);
    for (const auto& [name, col] : cols) {
      if (!std::isfinite(col[t])) throw DataError("feature " + name + " is not finite at row " + std::to_string(t));
      m.x.push_back(col[t]);
    }
    m.y.push_back(target.target[t]);
    m.base.push_back(target.base[t]);
    m.actual_next_tt.push_back(target.actual_next[t]);
  }
  return m;
}

void write_feature_matrix_csv(std::ostream& out, const FeatureMatrix& m) {
  std::vector<std::string> header = {"origin_date"};
  header.insert(header.end(), m.feature_names.begin(), m.feature_names.end());
  header.insert(header.end(), {"target_dtt", "base_tt", "actual_next_tt"});
  csv::write_row(out, header);
  std::vector<std::string> row;
  for (size_t r = 0; r < m.rows(); ++r) {
    row.clear();
    row.push_back(format_date(m.origin_dates[r]));
    for (double v : m.row(r)) row.push_back(csv::format_double(v));
    row.push_back(csv::format_double(m.y[r]));
    row.push_back(csv::format_double(m.base[r]));
    row.push_back(csv::format_double(m.actual_next_tt[r]));
    csv::write_row(out, row);
  }
}

FeatureMatrix read_feature_matrix_csv(std::istream& in, FeatureSet set) {
  const csv::Table table = csv::read_table(in);
  if (table.header.size() < 5 || table.header.front() != "origin_date" ||
      table.header[table.header.size() - 3] != "target_dtt" || table.header[table.header.size() - 2] != "base_tt" ||
      table.header.back() != "actual_next_tt") {
    throw DataError("feature csv: unexpected header layout");
  }
  FeatureMatrix m;
  m.set = set;
  m.feature_names.assign(table.header.begin() + 1, table.header.end() - 3);
  const size_t nf = m.feature_names.size();
  for (const auto& row : table.rows) {
    const auto d = parse_date(row[0]);
    if (!d) throw DataError("feature csv: bad origin_date '" + row[0] + "'");
    m.origin_dates.push_back(*d);
    for (size_t c = 0; c < nf; ++c) m.x.push_back(csv::parse_double(row[1 + c]));
    m.y.push_back(csv::parse_double(row[1 + nf]));
    m.base.push_back(csv::parse_double(row[2 + nf]));
    m.actual_next_tt.push_back(csv::parse_double(row[3 + nf]));
  }
  return m;
}

}  // namespace actorcast
