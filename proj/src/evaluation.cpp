#include "actorcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "actorcast/errors.hpp"
#include "actorcast/parallel.hpp"
#include "actorcast/rng.hpp"

namespace actorcast {

ChronoSplit chrono_split(const FeatureMatrix& matrix, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("chrono_split: train_fraction must be in (0, 1)");
  }
  const size_t n = matrix.rows();
  if (n < kMinSplitRows) {
    throw DataError("too few feature rows for a train/holdout split: " + std::to_string(n) + " < " +
                    std::to_string(kMinSplitRows));
  }
  const auto n_train = static_cast<size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
  return {matrix.slice(0, n_train), matrix.slice(n_train, n)};
}

FoldPlan ts_cv_folds(size_t n_rows, int k) {
  if (k < 1) throw std::invalid_argument("ts_cv_folds: k must be >= 1");
  const size_t blocks = static_cast<size_t>(k) + 1;
  if (n_rows < blocks) {
    throw std::invalid_argument("ts_cv_folds: need at least k+1 rows, got " + std::to_string(n_rows));
  }
  const size_t base = n_rows / blocks;
  const size_t extra = n_rows % blocks;
  std::vector<size_t> bounds = {0};
  for (size_t b = 0; b < blocks; ++b) bounds.push_back(bounds.back() + base + (b < extra ? 1 : 0));
  FoldPlan plan;
  for (size_t i = 1; i < blocks; ++i) plan.folds.push_back({{0, bounds[i]}, {bounds[i], bounds[i + 1]}});
  return plan;
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kRmse: return "rmse";
    case Metric::kMae: return "mae";
    case Metric::kR2: return "r2";
  }
  return "?";
}

Metrics compute_metrics(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw std::invalid_argument("compute_metrics: length mismatch");
  if (actual.empty()) throw std::invalid_argument("compute_metrics: empty input");
  const double n = static_cast<double>(actual.size());
  double sse = 0.0, sae = 0.0, mean = 0.0;
  for (size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    sse += e * e;
    sae += std::abs(e);
    mean += actual[i];
  }
  mean /= n;
  double sst = 0.0;
  for (double a : actual) sst += (a - mean) * (a - mean);
  Metrics m;
  m.rmse = std::sqrt(sse / n);
  m.mae = sae / n;
  if (sst > 0.0) m.r2 = 1.0 - sse / sst;
  return m;
}

std::optional<double> metric_value(const Metrics& m, Metric which) {
  switch (which) {
    case Metric::kRmse: return m.rmse;
    case Metric::kMae: return m.mae;
    case Metric::kR2: return m.r2;
  }
  return std::nullopt;
}

double percentile_linear(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("percentile_linear: empty input");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::optional<Interval> bootstrap_ci(std::span<const double> actual, std::span<const double> predicted,
                                     Metric metric, const BootstrapOptions& options) {
  if (actual.size() != predicted.size()) throw std::invalid_argument("bootstrap_ci: length mismatch");
  if (actual.size() < 10) throw std::invalid_argument("bootstrap_ci: need at least 10 observations");
  if (options.samples < 1) throw std::invalid_argument("bootstrap_ci: samples must be >= 1");
  const size_t n = actual.size();
  Rng rng(options.seed);
  std::vector<double> a(n), p(n), stats;
  stats.reserve(static_cast<size_t>(options.samples));
  const size_t block = options.block_length > 0 ? std::min<size_t>(static_cast<size_t>(options.block_length), n) : 1;
  for (int b = 0; b < options.samples; ++b) {
    for (size_t i = 0; i < n;) {
      const size_t start = static_cast<size_t>(rng.below(n - block + 1));
      for (size_t j = 0; j < block && i < n; ++j, ++i) {
        a[i] = actual[start + j];
        p[i] = predicted[start + j];
      }
    }
    if (const auto v = metric_value(compute_metrics(a, p), metric)) stats.push_back(*v);
  }
  if (stats.empty()) return std::nullopt;
  std::sort(stats.begin(), stats.end());
  return Interval{percentile_linear(stats, options.alpha / 2.0), percentile_linear(stats, 1.0 - options.alpha / 2.0)};
}

Reconstruction forecast_tt(const TrainedModel& model, const FeatureMatrix& rows) {
  return reconstruct(rows.base, predict(model, rows));
}

std::vector<ImportanceEntry> permutation_importance(const TrainedModel& model, const FeatureMatrix& holdout,
                                                    int repeats, std::uint64_t seed, unsigned threads) {
  if (holdout.rows() < 10) throw std::invalid_argument("permutation_importance: need at least 10 holdout rows");
  if (repeats < 1) throw std::invalid_argument("permutation_importance: repeats must be >= 1");
  const double baseline = compute_metrics(holdout.actual_next_tt, forecast_tt(model, holdout).tt).rmse;
  const size_t n = holdout.rows();

  // For GBT models the per-tree outputs of untouched trees are cached; the score is
  // re-accumulated in tree order so results match a full predict() bit for bit.
  const bool tree_model = model.kind == ModelKind::kGbt;
  std::vector<std::vector<double>> tree_out;
  std::vector<std::vector<char>> tree_uses;  // [feature][tree]
  if (tree_model) {
    const auto& trees = model.ensemble.trees;
    if (model.feature_names != holdout.feature_names) predict(model, holdout);  // throws with the diff
    tree_out.assign(trees.size(), std::vector<double>(n));
    tree_uses.assign(holdout.cols(), std::vector<char>(trees.size(), 0));
    for (size_t t = 0; t < trees.size(); ++t) {
      for (size_t r = 0; r < n; ++r) tree_out[t][r] = trees[t].predict(holdout.row(r));
      for (const TreeNode& node : trees[t].nodes) {
        if (node.feature >= 0) tree_uses[static_cast<size_t>(node.feature)][t] = 1;
      }
    }
  }

  std::vector<ImportanceEntry> entries(holdout.cols());
  parallel_for(holdout.cols(), threads, [&](size_t f) {
    ImportanceEntry& entry = entries[f];
    entry.feature = holdout.feature_names[f];
    FeatureMatrix shuffled = holdout;
    std::vector<double> column(n);
    for (size_t r = 0; r < n; ++r) column[r] = holdout.at(r, f);
    for (int rep = 0; rep < repeats; ++rep) {
      std::vector<double> perm = column;
      Rng rng(derive_seed(seed, "importance", f, static_cast<std::uint64_t>(rep)));
      rng.shuffle(std::span<double>(perm));
      for (size_t r = 0; r < n; ++r) shuffled.x[r * holdout.cols() + f] = perm[r];
      std::vector<double> delta(n);
      if (tree_model) {
        const auto& ens = model.ensemble;
        for (size_t r = 0; r < n; ++r) {
          double score = ens.base_score;
          for (size_t t = 0; t < ens.trees.size(); ++t) {
            const double out = tree_uses[f][t] ? ens.trees[t].predict(shuffled.row(r)) : tree_out[t][r];
            score += ens.learning_rate * out;
          }
          delta[r] = model.standardizer.inverse(score);
        }
      } else {
        delta = predict(model, shuffled);
      }
      const double rmse = compute_metrics(holdout.actual_next_tt, reconstruct(holdout.base, delta).tt).rmse;
      entry.per_repeat.push_back(rmse - baseline);
    }
    double sum = 0.0;
    for (double d : entry.per_repeat) sum += d;
    entry.delta_rmse = sum / static_cast<double>(repeats);
  });
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ImportanceEntry& a, const ImportanceEntry& b) { return a.delta_rmse > b.delta_rmse; });
  return entries;
}

}  // namespace actorcast
