#include "actorcast/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "actorcast/rng.hpp"

namespace actorcast {

namespace {

// A split must lower the node SSE by more than this fraction of it.
constexpr double kMinRelativeGain = 1e-12;

struct SlotStats {
  size_t n = 0;
  double sum = 0.0;
  double sse = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

struct SlotBest {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

class TreeBuilder {
 public:
  explicit TreeBuilder(const MatrixView& x) : x_(x), sorted_(x.cols), slot_of_(x.rows, -1) {
    for (size_t f = 0; f < x.cols; ++f) {
      auto& order = sorted_[f];
      order.resize(x.rows);
      std::iota(order.begin(), order.end(), std::uint32_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return x.at(a, f) < x.at(b, f); });
    }
  }

  RegressionTree build(std::span<const double> target, std::span<const size_t> rows,
                       std::span<const size_t> features, int max_depth, int min_leaf) {
    RegressionTree tree;
    tree.nodes.emplace_back();
    if (rows.empty()) return tree;

    std::vector<int> slot_node = {0};  // level slot -> node index
    for (size_t r : rows) slot_of_[r] = 0;
    const size_t min_leaf_n = static_cast<size_t>(std::max(1, min_leaf));

    for (int depth = 0;; ++depth) {
      const size_t n_slots = slot_node.size();
      std::vector<SlotStats> stats(n_slots);
      for (size_t r : rows) {
        const int s = slot_of_[r];
        if (s < 0) continue;
        SlotStats& st = stats[static_cast<size_t>(s)];
        ++st.n;
        st.sum += target[r];
        st.min = std::min(st.min, target[r]);
        st.max = std::max(st.max, target[r]);
      }
      for (size_t r : rows) {
        const int s = slot_of_[r];
        if (s < 0) continue;
        SlotStats& st = stats[static_cast<size_t>(s)];
        const double d = target[r] - st.sum / static_cast<double>(st.n);
        st.sse += d * d;
      }
      for (size_t s = 0; s < n_slots; ++s) {
        tree.nodes[static_cast<size_t>(slot_node[s])].value =
            stats[s].n ? stats[s].sum / static_cast<double>(stats[s].n) : 0.0;
      }

      std::vector<char> splittable(n_slots, 0);
      bool any = false;
      if (depth < max_depth) {
        for (size_t s = 0; s < n_slots; ++s) {
          splittable[s] = stats[s].n >= 2 * min_leaf_n && stats[s].min < stats[s].max;
          any = any || splittable[s];
        }
      }
      if (!any) break;

      std::vector<SlotBest> best(n_slots);
      std::vector<size_t> left_n(n_slots);
      std::vector<double> left_sum(n_slots);
      std::vector<double> last_value(n_slots);
      for (size_t f : features) {
        std::fill(left_n.begin(), left_n.end(), 0);
        std::fill(left_sum.begin(), left_sum.end(), 0.0);
        for (std::uint32_t r : sorted_[f]) {
          const int si = slot_of_[r];
          if (si < 0 || !splittable[static_cast<size_t>(si)]) continue;
          const size_t s = static_cast<size_t>(si);
          const double v = x_.at(r, f);
          const size_t ln = left_n[s];
          if (ln >= min_leaf_n && v > last_value[s]) {
            const size_t rn = stats[s].n - ln;
            if (rn >= min_leaf_n) {
              const double ls = left_sum[s];
              const double rs = stats[s].sum - ls;
              const double gain = ls * ls / static_cast<double>(ln) + rs * rs / static_cast<double>(rn) -
                                  stats[s].sum * stats[s].sum / static_cast<double>(stats[s].n);
              if (gain > best[s].gain) {
                double mid = last_value[s] + (v - last_value[s]) / 2.0;
                if (!(mid < v)) mid = last_value[s];
                best[s] = {gain, static_cast<int>(f), mid};
              }
            }
          }
          ++left_n[s];
          left_sum[s] += target[r];
          last_value[s] = v;
        }
      }

      std::vector<int> left_slot(n_slots, -1), right_slot(n_slots, -1);
      std::vector<int> next_slot_node;
      for (size_t s = 0; s < n_slots; ++s) {
        if (!splittable[s] || best[s].feature < 0 || !(best[s].gain > kMinRelativeGain * stats[s].sse)) continue;
        const size_t node = static_cast<size_t>(slot_node[s]);
        const int l = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        tree.nodes[node].feature = best[s].feature;
        tree.nodes[node].threshold = best[s].threshold;
        tree.nodes[node].left = l;
        tree.nodes[node].right = l + 1;
        left_slot[s] = static_cast<int>(next_slot_node.size());
        next_slot_node.push_back(l);
        right_slot[s] = static_cast<int>(next_slot_node.size());
        next_slot_node.push_back(l + 1);
      }
      if (next_slot_node.empty()) break;
      for (size_t r : rows) {
        const int s = slot_of_[r];
        if (s < 0) continue;
        const size_t su = static_cast<size_t>(s);
        if (left_slot[su] < 0) {
          slot_of_[r] = -1;
        } else {
          slot_of_[r] = x_.at(r, static_cast<size_t>(best[su].feature)) <= best[su].threshold ? left_slot[su]
                                                                                              : right_slot[su];
        }
      }
      slot_node = std::move(next_slot_node);
    }
    for (size_t r : rows) slot_of_[r] = -1;
    return tree;
  }

 private:
  const MatrixView& x_;
  std::vector<std::vector<std::uint32_t>> sorted_;
  std::vector<int> slot_of_;
};

size_t subsample_size(double fraction, size_t n) {
  return std::clamp<size_t>(static_cast<size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9)), 1, n);
}

}  // namespace

void GBTParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("GBTParams: " + what); };
  if (n_estimators < 0) fail("n_estimators must be >= 0");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (max_depth < 1) fail("max_depth must be >= 1");
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0)) fail("feature_fraction must be in (0, 1]");
  if (!(bagging_fraction > 0.0 && bagging_fraction <= 1.0)) fail("bagging_fraction must be in (0, 1]");
  if (min_samples_leaf < 1) fail("min_samples_leaf must be >= 1");
}

double RegressionTree::predict(std::span<const double> row) const {
  size_t node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& n = nodes[node];
    node = static_cast<size_t>(row[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[node].value;
}

RegressionTree fit_regression_tree(const MatrixView& x, std::span<const double> target,
                                   std::span<const size_t> rows, std::span<const size_t> features, int max_depth,
                                   int min_samples_leaf) {
  TreeBuilder builder(x);
  return builder.build(target, rows, features, max_depth, min_samples_leaf);
}

double GBTEnsemble::predict(std::span<const double> row, size_t n_trees) const {
  const size_t n = std::min(n_trees, trees.size());
  double score = base_score;
  for (size_t m = 0; m < n; ++m) score += learning_rate * trees[m].predict(row);
  return score;
}

std::vector<std::vector<double>> GBTEnsemble::staged_predict(const MatrixView& x,
                                                             std::span<const size_t> checkpoints) const {
  std::vector<std::vector<double>> out;
  out.reserve(checkpoints.size());
  std::vector<double> score(x.rows, base_score);
  size_t done = 0;
  for (size_t cp : checkpoints) {
    if (cp < done || cp > trees.size()) throw std::invalid_argument("staged_predict: bad checkpoint");
    for (; done < cp; ++done) {
      for (size_t r = 0; r < x.rows; ++r) score[r] += learning_rate * trees[done].predict(x.row(r));
    }
    out.push_back(score);
  }
  return out;
}

GBTEnsemble fit_gbt_ensemble(const MatrixView& x, std::span<const double> target, const GBTParams& params) {
  params.validate();
  if (target.size() != x.rows) throw std::invalid_argument("fit_gbt_ensemble: target length != rows");
  if (x.rows < 2 * static_cast<size_t>(params.min_samples_leaf)) {
    throw std::invalid_argument("fit_gbt_ensemble: need at least 2*min_samples_leaf rows, got " +
                                std::to_string(x.rows));
  }
  GBTEnsemble model;
  model.learning_rate = params.learning_rate;
  model.base_score = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(x.rows);

  const auto [lo, hi] = std::minmax_element(target.begin(), target.end());
  if (*lo == *hi) return model;

  std::vector<double> residual(x.rows);
  std::vector<double> score(x.rows, model.base_score);
  for (size_t r = 0; r < x.rows; ++r) residual[r] = target[r] - score[r];

  TreeBuilder builder(x);
  const size_t n_rows = subsample_size(params.bagging_fraction, x.rows);
  const size_t n_features = subsample_size(params.feature_fraction, x.cols);
  model.trees.reserve(static_cast<size_t>(params.n_estimators));
  for (int m = 0; m < params.n_estimators; ++m) {
    Rng rng(derive_seed(params.seed, "gbt_round", static_cast<std::uint64_t>(m)));
    const std::vector<size_t> rows = rng.sample_without_replacement(x.rows, n_rows);
    const std::vector<size_t> features = rng.sample_without_replacement(x.cols, n_features);
    RegressionTree tree = builder.build(residual, rows, features, params.max_depth, params.min_samples_leaf);
    for (size_t r = 0; r < x.rows; ++r) {
      score[r] += params.learning_rate * tree.predict(x.row(r));
      residual[r] = target[r] - score[r];
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace actorcast
