#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "actorcast/ar_model.hpp"
#include "actorcast/features.hpp"
#include "actorcast/gbt.hpp"

namespace actorcast {

inline constexpr int kModelFormatVersion = 1;

/// z = (y - mean) / std, fitted on training targets only.
struct TargetStandardizer {
  double mean = 0.0;
  double std = 1.0;

  static constexpr double kStdFloor = 1e-12;
  /// Population standard deviation, floored at kStdFloor.
  static TargetStandardizer fit(std::span<const double> y);
  double transform(double y) const { return (y - mean) / std; }
  double inverse(double z) const { return z * std + mean; }

  friend bool operator==(const TargetStandardizer&, const TargetStandardizer&) = default;
};

enum class ModelKind { kNaive, kArDiff, kGbt };
std::string_view model_kind_name(ModelKind kind);  // "naive", "ar_diff", "gbt"

/// Immutable fitted model. Prediction is a pure function of (model, rows).
struct TrainedModel {
  ModelKind kind = ModelKind::kNaive;
  /// gbt: exact, ordered feature list it was trained on. ar_diff: the TT lag columns
  /// it reads. naive: empty.
  std::vector<std::string> feature_names;
  TargetStandardizer standardizer;
  GBTParams params;
  GBTEnsemble ensemble;
  ArFit ar;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

/// Random walk: predicted change 0, so the forecast is the previous day's TT.
TrainedModel fit_naive();

/// AR on first differences of the training TT levels; forecasts the raw next difference.
TrainedModel fit_ar_diff(std::span<const double> tt_levels, int p_max = 5);

/// Boosted trees on standardized targets.
TrainedModel fit_gbt(const FeatureMatrix& train, const GBTParams& params);

/// Predicted change in TT (hours) for every row. Throws FeatureMismatchError when the
/// rows do not carry the features the model expects.
std::vector<double> predict(const TrainedModel& model, const FeatureMatrix& rows);

/// GBT only: destandardized predictions after each checkpoint tree count.
std::vector<std::vector<double>> staged_predict(const TrainedModel& model, const FeatureMatrix& rows,
                                                std::span<const size_t> checkpoints);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

}  // namespace actorcast
