#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actorcast/features.hpp"
#include "actorcast/models.hpp"

namespace actorcast {

// ---------------------------------------------------------------------------
// Splitting

inline constexpr size_t kMinSplitRows = 25;

struct ChronoSplit {
  FeatureMatrix train;
  FeatureMatrix holdout;
};

/// First floor(train_fraction * n) rows train, the rest holdout; order is kept.
/// Throws DataError below kMinSplitRows rows.
ChronoSplit chrono_split(const FeatureMatrix& matrix, double train_fraction = 0.8);

struct IndexRange {
  size_t begin = 0;
  size_t end = 0;  // exclusive
  size_t size() const { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct Fold {
  IndexRange train;
  IndexRange validation;
};

/// Expanding-window folds: rows are cut into k+1 consecutive blocks (earlier blocks
/// absorb the remainder); fold i trains on blocks 0..i-1 and validates on block i.
struct FoldPlan {
  std::vector<Fold> folds;
};

/// Throws std::invalid_argument when n_rows < k + 1 or k < 1.
FoldPlan ts_cv_folds(size_t n_rows, int k = 5);

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;  // absent when the actuals have zero variance
};

enum class Metric { kRmse, kMae, kR2 };
std::string_view metric_name(Metric m);

/// Throws std::invalid_argument on empty input or length mismatch.
Metrics compute_metrics(std::span<const double> actual, std::span<const double> predicted);
std::optional<double> metric_value(const Metrics& m, Metric which);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct BootstrapOptions {
  int samples = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  /// 0 = i.i.d. day resampling; otherwise moving blocks of this length.
  int block_length = 0;
};

/// Linear-interpolation percentile of sorted values, q in [0, 1].
double percentile_linear(std::span<const double> sorted, double q);

/// Percentile bootstrap interval over resampled days. Requires at least 10 pairs.
/// Replicates where the metric is undefined (R² with constant actuals) are skipped;
/// returns nullopt if none remain.
std::optional<Interval> bootstrap_ci(std::span<const double> actual, std::span<const double> predicted,
                                     Metric metric, const BootstrapOptions& options);

// ---------------------------------------------------------------------------
// Evaluation helpers

/// Reconstructed next-day TT forecasts of `model` on `rows`, with the clamp count.
Reconstruction forecast_tt(const TrainedModel& model, const FeatureMatrix& rows);

struct ImportanceEntry {
  std::string feature;
  double delta_rmse = 0.0;  // mean over repeats
  std::vector<double> per_repeat;
};

/// Mean increase of reconstructed-TT RMSE when one column is shuffled within the
/// holdout, sorted by decreasing delta (ties keep feature order). Shuffle r of
/// feature f uses derive_seed(seed, "importance", f, r). Requires >= 10 rows.
std::vector<ImportanceEntry> permutation_importance(const TrainedModel& model, const FeatureMatrix& holdout,
                                                    int repeats, std::uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Grid search

/// Cartesian product of value lists, enumerated with n_estimators varying slowest
/// and bagging_fraction fastest.
struct GridSpec {
  std::vector<int> n_estimators = {1000, 1500, 3000};
  std::vector<double> learning_rate = {0.05, 0.1, 0.2};
  std::vector<int> max_depth = {5, 6, 7};
  std::vector<double> feature_fraction = {0.6, 0.8, 0.9};
  std::vector<double> bagging_fraction = {0.6, 0.8, 0.9, 1.0};
  int min_samples_leaf = 5;
};

std::vector<GBTParams> expand_grid(const GridSpec& spec, std::uint64_t seed);

struct CandidateResult {
  size_t index = 0;  // declaration order
  GBTParams params;
  std::vector<double> fold_rmse;
  double mean_rmse = 0.0;
  bool disqualified = false;
  std::string reason;
};

struct GridSearchResult {
  size_t best_index = 0;
  GBTParams best;
  std::vector<CandidateResult> table;  // declaration order
};

/// Scores every candidate by the mean validation RMSE of reconstructed TT over the
/// folds. Lowest score wins; ties go to fewer estimators, then shallower depth, then
/// lower learning rate, then declaration order. Candidates that differ only in
/// n_estimators share one fit per fold, read out at each tree count.
/// Throws DataError if every candidate is disqualified.
GridSearchResult grid_search(const FeatureMatrix& train, std::span<const GBTParams> grid, const FoldPlan& folds,
                             unsigned threads = 1);

/// True if `a` beats `b` under the tie-break chain (both scored).
bool candidate_precedes(const CandidateResult& a, const CandidateResult& b);

}  // namespace actorcast
