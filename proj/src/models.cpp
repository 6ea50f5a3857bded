#include "actorcast/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "actorcast/errors.hpp"

namespace actorcast {

namespace {

using nlohmann::json;

MatrixView view_of(const FeatureMatrix& m) { return {m.x.data(), m.rows(), m.cols()}; }

std::string describe_mismatch(const std::vector<std::string>& expected, const std::vector<std::string>& got) {
  const std::set<std::string> e(expected.begin(), expected.end()), g(got.begin(), got.end());
  std::vector<std::string> missing, extra;
  std::set_difference(e.begin(), e.end(), g.begin(), g.end(), std::back_inserter(missing));
  std::set_difference(g.begin(), g.end(), e.begin(), e.end(), std::back_inserter(extra));
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size() && i < 10; ++i) s += (i ? ", " : "") + v[i];
    if (v.size() > 10) s += ", ... (" + std::to_string(v.size()) + " total)";
    return s;
  };
  std::string msg = "feature mismatch: model expects " + std::to_string(expected.size()) + " features, input has " +
                    std::to_string(got.size());
  if (!missing.empty()) msg += "; missing: " + join(missing);
  if (!extra.empty()) msg += "; unexpected: " + join(extra);
  if (missing.empty() && extra.empty()) {
    for (size_t i = 0; i < expected.size(); ++i) {
      if (expected[i] != got[i]) {
        msg += "; order differs at position " + std::to_string(i) + " (expected " + expected[i] + ", got " +
               got[i] + ")";
        break;
      }
    }
  }
  return msg;
}

void check_gbt_features(const TrainedModel& model, const FeatureMatrix& rows) {
  if (model.feature_names != rows.feature_names) {
    throw FeatureMismatchError(describe_mismatch(model.feature_names, rows.feature_names));
  }
}

std::string ar_lag_name(int k) { return "TT_lag" + std::to_string(k); }

}  // namespace

TargetStandardizer TargetStandardizer::fit(std::span<const double> y) {
  TargetStandardizer s;
  if (y.empty()) return s;
  const double n = static_cast<double>(y.size());
  s.mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : y) ss += (v - s.mean) * (v - s.mean);
  s.std = std::max(std::sqrt(ss / n), kStdFloor);
  return s;
}

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kNaive: return "naive";
    case ModelKind::kArDiff: return "ar_diff";
    case ModelKind::kGbt: return "gbt";
  }
  return "?";
}

TrainedModel fit_naive() { return TrainedModel{}; }

TrainedModel fit_ar_diff(std::span<const double> tt_levels, int p_max) {
  TrainedModel model;
  model.kind = ModelKind::kArDiff;
  model.ar = fit_ar_on_differences(tt_levels, p_max);
  for (int k = 1; k <= model.ar.order; ++k) model.feature_names.push_back(ar_lag_name(k));
  return model;
}

TrainedModel fit_gbt(const FeatureMatrix& train, const GBTParams& params) {
  TrainedModel model;
  model.kind = ModelKind::kGbt;
  model.feature_names = train.feature_names;
  model.params = params;
  model.standardizer = TargetStandardizer::fit(train.y);
  std::vector<double> z(train.y.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = model.standardizer.transform(train.y[i]);
  model.ensemble = fit_gbt_ensemble(view_of(train), z, params);
  return model;
}

std::vector<double> predict(const TrainedModel& model, const FeatureMatrix& rows) {
  std::vector<double> out(rows.rows(), 0.0);
  switch (model.kind) {
    case ModelKind::kNaive:
      return out;
    case ModelKind::kGbt: {
      check_gbt_features(model, rows);
      for (size_t r = 0; r < rows.rows(); ++r) {
        out[r] = model.standardizer.inverse(model.ensemble.predict(rows.row(r)));
      }
      return out;
    }
    case ModelKind::kArDiff: {
      // diff[t-j] from base and TT lags: diff[t] = base - lag1, diff[t-j] = lag_j - lag_{j+1}
      std::vector<size_t> lag_col(static_cast<size_t>(model.ar.order) + 1);
      for (int k = 1; k <= model.ar.order; ++k) {
        const size_t c = rows.find_feature(ar_lag_name(k));
        if (c == std::string::npos) {
          throw FeatureMismatchError("feature mismatch: AR model needs column " + ar_lag_name(k));
        }
        lag_col[static_cast<size_t>(k)] = c;
      }
      std::vector<double> recent(static_cast<size_t>(model.ar.order));
      for (size_t r = 0; r < rows.rows(); ++r) {
        for (int j = 0; j < model.ar.order; ++j) {
          const double newer = j == 0 ? rows.base[r] : rows.at(r, lag_col[static_cast<size_t>(j)]);
          const double older = rows.at(r, lag_col[static_cast<size_t>(j) + 1]);
          recent[static_cast<size_t>(j)] = newer - older;
        }
        out[r] = ar_forecast_next_difference(model.ar, recent);
      }
      return out;
    }
  }
  return out;
}

std::vector<std::vector<double>> staged_predict(const TrainedModel& model, const FeatureMatrix& rows,
                                                std::span<const size_t> checkpoints) {
  if (model.kind != ModelKind::kGbt) throw std::invalid_argument("staged_predict: GBT models only");
  check_gbt_features(model, rows);
  auto stages = model.ensemble.staged_predict(view_of(rows), checkpoints);
  for (auto& stage : stages) {
    for (double& v : stage) v = model.standardizer.inverse(v);
  }
  return stages;
}

json model_to_json(const TrainedModel& model) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = model_kind_name(model.kind);
  doc["feature_names"] = model.feature_names;
  doc["standardizer"] = {{"mean", model.standardizer.mean}, {"std", model.standardizer.std}};
  if (model.kind == ModelKind::kGbt) {
    const GBTParams& p = model.params;
    doc["params"] = {{"n_estimators", p.n_estimators},         {"learning_rate", p.learning_rate},
                     {"max_depth", p.max_depth},               {"feature_fraction", p.feature_fraction},
                     {"bagging_fraction", p.bagging_fraction}, {"min_samples_leaf", p.min_samples_leaf},
                     {"seed", p.seed}};
    doc["base_score"] = model.ensemble.base_score;
    doc["learning_rate"] = model.ensemble.learning_rate;
    json trees = json::array();
    for (const RegressionTree& tree : model.ensemble.trees) {
      json nodes = json::array();
      for (const TreeNode& n : tree.nodes) {
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                         {"right", n.right}, {"value", n.value}});
      }
      trees.push_back(std::move(nodes));
    }
    doc["trees"] = std::move(trees);
  } else if (model.kind == ModelKind::kArDiff) {
    doc["params"] = {{"order", model.ar.order},
                     {"intercept", model.ar.intercept},
                     {"coefficients", model.ar.coefficients},
                     {"aic", model.ar.aic},
                     {"sigma2", model.ar.sigma2},
                     {"warnings", model.ar.warnings}};
  } else {
    doc["params"] = json::object();
  }
  return doc;
}

TrainedModel model_from_json(const json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      throw DataError("model json: unsupported format_version");
    }
    TrainedModel model;
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "naive") {
      model.kind = ModelKind::kNaive;
    } else if (kind == "ar_diff") {
      model.kind = ModelKind::kArDiff;
    } else if (kind == "gbt") {
      model.kind = ModelKind::kGbt;
    } else {
      throw DataError("model json: unknown kind '" + kind + "'");
    }
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.standardizer.mean = doc.at("standardizer").at("mean").get<double>();
    model.standardizer.std = doc.at("standardizer").at("std").get<double>();
    const json& p = doc.at("params");
    if (model.kind == ModelKind::kGbt) {
      model.params.n_estimators = p.at("n_estimators").get<int>();
      model.params.learning_rate = p.at("learning_rate").get<double>();
      model.params.max_depth = p.at("max_depth").get<int>();
      model.params.feature_fraction = p.at("feature_fraction").get<double>();
      model.params.bagging_fraction = p.at("bagging_fraction").get<double>();
      model.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
      model.params.seed = p.at("seed").get<std::uint64_t>();
      model.ensemble.base_score = doc.at("base_score").get<double>();
      model.ensemble.learning_rate = doc.at("learning_rate").get<double>();
      for (const json& nodes : doc.at("trees")) {
        RegressionTree tree;
        for (const json& n : nodes) {
          tree.nodes.push_back({n.at("feature").get<int>(), n.at("threshold").get<double>(), n.at("left").get<int>(),
                                n.at("right").get<int>(), n.at("value").get<double>()});
        }
        model.ensemble.trees.push_back(std::move(tree));
      }
    } else if (model.kind == ModelKind::kArDiff) {
      model.ar.order = p.at("order").get<int>();
      model.ar.intercept = p.at("intercept").get<double>();
      model.ar.coefficients = p.at("coefficients").get<std::vector<double>>();
      model.ar.aic = p.at("aic").get<double>();
      model.ar.sigma2 = p.at("sigma2").get<double>();
      model.ar.warnings = p.at("warnings").get<std::vector<std::string>>();
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("model json: ") + e.what());
  }
}

}  // namespace actorcast
