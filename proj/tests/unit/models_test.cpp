#include <gtest/gtest.h>

#include <cmath>

#include "../support/synthetic.hpp"
#include "actorcast/errors.hpp"
#include "actorcast/models.hpp"

using namespace actorcast;

namespace {

GBTParams small_params() {
  GBTParams p;
  p.n_estimators = 30;
  p.max_depth = 3;
  return p;
}

}  // namespace

TEST(Standardizer, PopulationStdAndFloor) {
  const auto s = TargetStandardizer::fit(std::vector<double>{1, 3});
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.std, 1.0);
  EXPECT_DOUBLE_EQ(s.inverse(s.transform(7.5)), 7.5);
  EXPECT_EQ(TargetStandardizer::fit(std::vector<double>{4, 4, 4}).std, TargetStandardizer::kStdFloor);
}

TEST(Naive, PredictsNoChange) {
  const FeatureMatrix m = build_feature_matrix(synthetic::random_panel(40, 1), FeatureSet::kBaseline);
  const auto d = predict(fit_naive(), m);
  EXPECT_EQ(d, std::vector<double>(m.rows(), 0.0));
}

TEST(ArDiff, PredictionUsesLagColumns) {
  const SeriesPanel p = synthetic::random_panel(120, 5);
  const FeatureMatrix m = build_feature_matrix(p, FeatureSet::kBaseline);
  TrainedModel model = fit_ar_diff(p.tt, 5);
  // Force a known order so every lag path is exercised.
  model.ar.order = 3;
  model.ar.intercept = 0.1;
  model.ar.coefficients = {0.5, -0.2, 0.3};
  const auto d = predict(model, m);
  for (size_t r = 0; r < m.rows(); ++r) {
    const size_t t = r + 20;
    const double expect = 0.1 + 0.5 * (p.tt[t] - p.tt[t - 1]) - 0.2 * (p.tt[t - 1] - p.tt[t - 2]) +
                          0.3 * (p.tt[t - 2] - p.tt[t - 3]);
    EXPECT_NEAR(d[r], expect, 1e-9);
  }
}

TEST(Gbt, TrainsOnStandardizedTargets) {
  const FeatureMatrix m = build_feature_matrix(synthetic::random_panel(80, 2), FeatureSet::kActorEnriched);
  const TrainedModel model = fit_gbt(m, small_params());
  EXPECT_EQ(model.feature_names, m.feature_names);
  EXPECT_NEAR(model.standardizer.mean, std::accumulate(m.y.begin(), m.y.end(), 0.0) / m.y.size(), 1e-12);
  EXPECT_NEAR(model.ensemble.base_score, 0.0, 1e-12);
  const auto d = predict(model, m);
  for (size_t r = 0; r < m.rows(); ++r) {
    EXPECT_NEAR(d[r], model.standardizer.inverse(model.ensemble.predict(m.row(r))), 1e-12);
  }
  const std::vector<size_t> cps = {model.ensemble.trees.size()};
  EXPECT_EQ(staged_predict(model, m, cps)[0], d);
}

TEST(Gbt, RejectsMismatchedFeatures) {
  const SeriesPanel p = synthetic::random_panel(60, 3);
  const FeatureMatrix actor = build_feature_matrix(p, FeatureSet::kActorEnriched);
  const FeatureMatrix base = build_feature_matrix(p, FeatureSet::kBaseline);
  const TrainedModel model = fit_gbt(actor, small_params());
  EXPECT_THROW(predict(model, base), FeatureMismatchError);
  FeatureMatrix swapped = actor;
  std::swap(swapped.feature_names[0], swapped.feature_names[1]);
  try {
    predict(model, swapped);
    FAIL();
  } catch (const FeatureMismatchError& e) {
    EXPECT_NE(std::string(e.what()).find("order differs at position 0"), std::string::npos);
  }
  FeatureMatrix no_lags = base;
  no_lags.feature_names[0] = "x";
  TrainedModel ar = fit_ar_diff(p.tt, 5);
  ar.ar.order = 1;
  ar.ar.coefficients = {0.5};
  EXPECT_THROW(predict(ar, no_lags), FeatureMismatchError);
}

TEST(ModelJson, RoundTripIsExact) {
  const SeriesPanel p = synthetic::random_panel(90, 4);
  const FeatureMatrix m = build_feature_matrix(p, FeatureSet::kActorEnriched);
  for (const TrainedModel& model : {fit_gbt(m, small_params()), fit_ar_diff(p.tt, 5), fit_naive()}) {
    const auto text = model_to_json(model).dump();
    const TrainedModel back = model_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back, model) << model_kind_name(model.kind);
    EXPECT_EQ(predict(back, m), predict(model, m));
  }
}

TEST(ModelJson, RejectsBadDocuments) {
  auto doc = model_to_json(fit_naive());
  doc["format_version"] = 99;
  EXPECT_THROW(model_from_json(doc), DataError);
  doc = model_to_json(fit_naive());
  doc["kind"] = "forest";
  EXPECT_THROW(model_from_json(doc), DataError);
  EXPECT_THROW(model_from_json(nlohmann::json::object()), DataError);
}
