#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "actorcast/errors.hpp"
#include "actorcast/evaluation.hpp"
#include "actorcast/parallel.hpp"

namespace actorcast {

std::vector<GBTParams> expand_grid(const GridSpec& spec, std::uint64_t seed) {
  std::vector<GBTParams> out;
  for (int n : spec.n_estimators) {
    for (double lr : spec.learning_rate) {
      for (int depth : spec.max_depth) {
        for (double ff : spec.feature_fraction) {
          for (double bf : spec.bagging_fraction) {
            GBTParams p;
            p.n_estimators = n;
            p.learning_rate = lr;
            p.max_depth = depth;
            p.feature_fraction = ff;
            p.bagging_fraction = bf;
            p.min_samples_leaf = spec.min_samples_leaf;
            p.seed = seed;
            p.validate();
            out.push_back(p);
          }
        }
      }
    }
  }
  if (out.empty()) throw ConfigError("hyperparameter grid is empty");
  return out;
}

bool candidate_precedes(const CandidateResult& a, const CandidateResult& b) {
  if (a.mean_rmse != b.mean_rmse) return a.mean_rmse < b.mean_rmse;
  if (a.params.n_estimators != b.params.n_estimators) return a.params.n_estimators < b.params.n_estimators;
  if (a.params.max_depth != b.params.max_depth) return a.params.max_depth < b.params.max_depth;
  if (a.params.learning_rate != b.params.learning_rate) return a.params.learning_rate < b.params.learning_rate;
  return a.index < b.index;
}

namespace {

using GroupKey = std::tuple<double, int, double, double, int, std::uint64_t>;

GroupKey group_key(const GBTParams& p) {
  return {p.learning_rate, p.max_depth, p.feature_fraction, p.bagging_fraction, p.min_samples_leaf, p.seed};
}

struct Group {
  GBTParams params;                 // n_estimators = largest member
  std::vector<size_t> members;      // candidate indices
  std::vector<size_t> checkpoints;  // sorted distinct tree counts
};

}  // namespace

GridSearchResult grid_search(const FeatureMatrix& train, std::span<const GBTParams> grid, const FoldPlan& folds,
                             unsigned threads) {
  if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
  if (folds.folds.empty()) throw std::invalid_argument("grid_search: no folds");

  std::map<GroupKey, size_t> group_of;
  std::vector<Group> groups;
  for (size_t i = 0; i < grid.size(); ++i) {
    auto [it, inserted] = group_of.emplace(group_key(grid[i]), groups.size());
    if (inserted) groups.push_back({grid[i], {}, {}});
    Group& g = groups[it->second];
    g.members.push_back(i);
    g.params.n_estimators = std::max(g.params.n_estimators, grid[i].n_estimators);
    g.checkpoints.push_back(static_cast<size_t>(grid[i].n_estimators));
  }
  for (Group& g : groups) {
    std::sort(g.checkpoints.begin(), g.checkpoints.end());
    g.checkpoints.erase(std::unique(g.checkpoints.begin(), g.checkpoints.end()), g.checkpoints.end());
  }

  const size_t n_folds = folds.folds.size();
  // rmse[group][fold][checkpoint]; empty when the fit was impossible
  std::vector<std::vector<std::vector<double>>> rmse(groups.size(), std::vector<std::vector<double>>(n_folds));
  std::vector<std::vector<std::string>> failure(groups.size(), std::vector<std::string>(n_folds));

  parallel_for(groups.size() * n_folds, threads, [&](size_t job) {
    const size_t gi = job / n_folds;
    const size_t fi = job % n_folds;
    const Group& g = groups[gi];
    const Fold& fold = folds.folds[fi];
    const FeatureMatrix fit_rows = train.slice(fold.train.begin, fold.train.end);
    const FeatureMatrix val_rows = train.slice(fold.validation.begin, fold.validation.end);
    if (fit_rows.rows() < 2 * static_cast<size_t>(g.params.min_samples_leaf)) {
      failure[gi][fi] = "fold " + std::to_string(fi) + " has " + std::to_string(fit_rows.rows()) +
                        " training rows, fewer than 2 * min_samples_leaf";
      return;
    }
    const TrainedModel model = fit_gbt(fit_rows, g.params);
    // Zero-tree models (constant targets) read every checkpoint as the same prediction.
    std::vector<size_t> capped(g.checkpoints.size());
    for (size_t k = 0; k < capped.size(); ++k) capped[k] = std::min(g.checkpoints[k], model.ensemble.trees.size());
    const auto stages = staged_predict(model, val_rows, capped);
    for (const auto& delta : stages) {
      const Reconstruction rec = reconstruct(val_rows.base, delta);
      rmse[gi][fi].push_back(compute_metrics(val_rows.actual_next_tt, rec.tt).rmse);
    }
  });

  GridSearchResult result;
  result.table.resize(grid.size());
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const Group& g = groups[gi];
    for (size_t c : g.members) {
      CandidateResult& cand = result.table[c];
      cand.index = c;
      cand.params = grid[c];
      const size_t k = static_cast<size_t>(
          std::lower_bound(g.checkpoints.begin(), g.checkpoints.end(), static_cast<size_t>(grid[c].n_estimators)) -
          g.checkpoints.begin());
      double sum = 0.0;
      for (size_t fi = 0; fi < n_folds; ++fi) {
        if (!failure[gi][fi].empty()) {
          cand.disqualified = true;
          cand.reason = failure[gi][fi];
          break;
        }
        cand.fold_rmse.push_back(rmse[gi][fi][k]);
        sum += rmse[gi][fi][k];
      }
      if (!cand.disqualified) {
        cand.mean_rmse = sum / static_cast<double>(n_folds);
        if (!std::isfinite(cand.mean_rmse)) {
          cand.disqualified = true;
          cand.reason = "non-finite validation error";
        }
      } else {
        cand.fold_rmse.clear();
        cand.mean_rmse = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }

  const CandidateResult* best = nullptr;
  for (const CandidateResult& cand : result.table) {
    if (cand.disqualified) continue;
    if (best == nullptr || candidate_precedes(cand, *best)) best = &cand;
  }
  if (best == nullptr) {
    throw DataError("grid search: every candidate was disqualified (" + result.table.front().reason + ")");
  }
  result.best_index = best->index;
  result.best = best->params;
  return result;
}

}  // namespace actorcast
