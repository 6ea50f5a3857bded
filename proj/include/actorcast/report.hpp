#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "actorcast/evaluation.hpp"
#include "actorcast/time.hpp"

namespace actorcast {

/// One forecast day of one model. TT values are in hours.
struct PredictionRow {
  Date date;
  double actual_tt = 0.0;
  double predicted_tt = 0.0;
  std::string model;        // "gbt", "ar_diff", "naive"
  std::string feature_set;  // "baseline", "actor", or "" for the benchmarks
};

/// `date,actual_tt,predicted_tt,model,feature_set`
void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> read_predictions_csv(std::istream& in);

/// `rank,feature,delta_rmse` (rank starts at 1).
void write_importance_csv(std::ostream& out, const std::vector<ImportanceEntry>& entries);
std::vector<ImportanceEntry> read_importance_csv(std::istream& in);

/// `feature_set,candidate,n_estimators,learning_rate,max_depth,feature_fraction,bagging_fraction,
/// min_samples_leaf,fold_1..fold_k,mean_rmse,selected,status`
void write_cv_table_csv(std::ostream& out, const std::vector<std::pair<std::string, GridSearchResult>>& results);

/// Forecasts of one model on the holdout.
struct ModelRun {
  std::string model;
  std::string feature_set;
  std::vector<Date> dates;
  std::vector<double> actual;
  std::vector<double> predicted;
};

/// Groups prediction rows back into runs, in first-appearance order.
std::vector<ModelRun> runs_from_predictions(const std::vector<PredictionRow>& rows);

struct MetricBlock {
  Metrics point;
  Interval rmse_ci;
  Interval mae_ci;
  std::optional<Interval> r2_ci;
};

/// Table row: baseline/actor blocks and deltas. Benchmarks have no actor column.
struct ReportRow {
  std::string model;
  std::optional<MetricBlock> baseline;
  std::optional<MetricBlock> actor;
  /// rmse, mae: baseline - actor; r2: actor - baseline.
  std::optional<Metrics> delta;
};

struct ReportOptions {
  /// "hours" or "days"; values are divided by 24 for days.
  std::string unit = "hours";
  BootstrapOptions bootstrap;
};

struct EvaluationReport {
  std::string unit;
  std::vector<Date> holdout_dates;
  std::vector<ReportRow> rows;
  std::vector<ImportanceEntry> importance;
  std::string importance_model;
};

/// Builds the comparison table from stored holdout runs. Every run must cover the same
/// dates in the same order; throws DataError otherwise.
EvaluationReport compare_report(const std::vector<ModelRun>& runs, const ReportOptions& options);

nlohmann::ordered_json report_to_json(const EvaluationReport& report);
std::string render_report_markdown(const EvaluationReport& report);

}  // namespace actorcast
