#pragma once

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "actorcast/peaks.hpp"
#include "actorcast/time.hpp"
#include "actorcast/timeseries.hpp"

namespace actorcast {

/// Daily series; NaN marks an undefined position (warm-up).
using Series = std::vector<double>;

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();
inline bool is_defined(double v) { return !std::isnan(v); }

inline constexpr int kMaxLag = 20;
inline constexpr int kRollingWindows[] = {3, 7, 14};

/// out[t] = x[t-k]; the first k positions are undefined. Throws std::invalid_argument for k < 1.
Series lag(std::span<const double> x, int k);

enum class RollingStat { kMean, kStd, kMax };
std::string_view rolling_stat_name(RollingStat stat);

/// Trailing window ending at (and including) t; defined from t = window-1. std uses n-1.
Series rolling_stat(std::span<const double> x, int window, RollingStat stat);

/// (x_t - mean7_t) / std7_t, 0 where std7 < 1e-12; defined from t = 6.
Series zscore7(std::span<const double> x);

struct TargetSeries {
  Series delta;           // delta[t] = tt[t] - tt[t-1]
  Series smoothed_delta;  // trailing 3-point mean of delta, defined from t = 3
  Series target;          // origin-aligned: target[t] = smoothed_delta[t+1]
  Series base;            // base[t] = tt[t]
  Series actual_next;     // actual_next[t] = tt[t+1]
};

/// Throws DataError("insufficient history") when fewer than 4 values are given.
TargetSeries make_target(std::span<const double> tt);

struct Reconstruction {
  std::vector<double> tt;
  size_t clamped = 0;  // forecasts raised to 0
};

/// tt_hat[i] = max(0, base[i] + delta_hat[i]).
Reconstruction reconstruct(std::span<const double> base, std::span<const double> delta_hat);

enum class FeatureSet { kBaseline, kActorEnriched };
std::string_view feature_set_name(FeatureSet set);  // "baseline" / "actor"

enum class PeakMode {
  kPaper,   // indicator from the whole series (looks ahead)
  kCausal,  // decided from data up to each position
};

struct FeatureOptions {
  PeakMode peak_mode = PeakMode::kPaper;
  PeakOptions peaks;
};

/// Full-length engineered columns in template order, undefined cells as NaN.
std::vector<std::pair<std::string, Series>> feature_columns(const SeriesPanel& panel, FeatureSet set,
                                                            const FeatureOptions& options = {});

/// Names of features whose value at t depends on data after t under `options`.
std::vector<std::string> lookahead_features(const FeatureOptions& options);

/// Aligned supervised rows: features at origin t, target = smoothed delta at t+1.
struct FeatureMatrix {
  FeatureSet set = FeatureSet::kBaseline;
  std::vector<Date> origin_dates;
  std::vector<std::string> feature_names;
  std::vector<double> x;  // row-major, rows() x cols()
  std::vector<double> y;
  std::vector<double> base;
  std::vector<double> actual_next_tt;

  size_t rows() const { return origin_dates.size(); }
  size_t cols() const { return feature_names.size(); }
  double at(size_t r, size_t c) const { return x[r * cols() + c]; }
  std::span<const double> row(size_t r) const { return {x.data() + r * cols(), cols()}; }

  /// Rows [begin, end).
  FeatureMatrix slice(size_t begin, size_t end) const;
  /// Index of a named feature, or npos.
  size_t find_feature(std::string_view name) const;
};

/// Requires more than kMaxLag + 1 panel rows; throws DataError otherwise.
FeatureMatrix build_feature_matrix(const SeriesPanel& panel, FeatureSet set, const FeatureOptions& options = {});

/// `origin_date,<features...>,target_dtt,base_tt,actual_next_tt`
void write_feature_matrix_csv(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_feature_matrix_csv(std::istream& in, FeatureSet set);

}  // namespace actorcast
