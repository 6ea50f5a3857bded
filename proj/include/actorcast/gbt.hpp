#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace actorcast {

/// Row-major, read-only view of a dense feature matrix.
struct MatrixView {
  const double* data = nullptr;
  size_t rows = 0;
  size_t cols = 0;

  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(size_t r) const { return {data + r * cols, cols}; }
};

struct GBTParams {
  int n_estimators = 1000;
  double learning_rate = 0.1;
  int max_depth = 5;
  double feature_fraction = 0.9;
  double bagging_fraction = 0.9;
  int min_samples_leaf = 5;
  std::uint64_t seed = 42;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  friend bool operator==(const GBTParams&, const GBTParams&) = default;
};

/// Leaf iff feature < 0. Rows with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> row) const;
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

/// Exact greedy least-squares tree on `rows` (sorted, distinct) considering only
/// `features` (sorted, distinct). Candidate thresholds are midpoints between
/// consecutive distinct values; a split is taken only if it strictly lowers the node
/// SSE and both children keep at least `min_samples_leaf` rows. Equal gains resolve
/// to the lowest feature index, then the lowest threshold. Leaves hold the mean target.
RegressionTree fit_regression_tree(const MatrixView& x, std::span<const double> target,
                                   std::span<const size_t> rows, std::span<const size_t> features, int max_depth,
                                   int min_samples_leaf);

struct GBTEnsemble {
  double base_score = 0.0;
  double learning_rate = 0.0;
  std::vector<RegressionTree> trees;

  /// Raw (standardized-scale) score using the first `n_trees` trees (all by default).
  double predict(std::span<const double> row, size_t n_trees = static_cast<size_t>(-1)) const;

  /// Scores for every row of `x` after each checkpoint number of trees (ascending,
  /// each <= trees.size()). result[k][r] is row r at checkpoints[k].
  std::vector<std::vector<double>> staged_predict(const MatrixView& x, std::span<const size_t> checkpoints) const;

  friend bool operator==(const GBTEnsemble&, const GBTEnsemble&) = default;
};

/// Squared-loss boosting. Round m draws its row and feature subsamples (without
/// replacement) from a stream seeded by derive_seed(seed, "gbt_round", m), so the
/// first k trees of an n-round fit equal a k-round fit. All-equal targets give a
/// zero-tree model.
GBTEnsemble fit_gbt_ensemble(const MatrixView& x, std::span<const double> target, const GBTParams& params);

}  // namespace actorcast
