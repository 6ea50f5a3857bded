#include "actorcast/report.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "actorcast/csv.hpp"
#include "actorcast/errors.hpp"

namespace actorcast {

namespace {

using nlohmann::ordered_json;

const char* const kModelOrder[] = {"gbt", "ar_diff", "naive"};

double parse_field(const std::string& text, size_t line, const char* what) {
  try {
    return csv::parse_double(text);
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line) + ": bad " + what + " '" + text + "'");
  }
}

MetricBlock score(const ModelRun& run, const BootstrapOptions& bootstrap) {
  MetricBlock block;
  block.point = compute_metrics(run.actual, run.predicted);
  block.rmse_ci = *bootstrap_ci(run.actual, run.predicted, Metric::kRmse, bootstrap);
  block.mae_ci = *bootstrap_ci(run.actual, run.predicted, Metric::kMae, bootstrap);
  block.r2_ci = bootstrap_ci(run.actual, run.predicted, Metric::kR2, bootstrap);
  return block;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json interval_json(const std::optional<Interval>& ci) {
  if (!ci) return nullptr;
  return ordered_json::array({ci->low, ci->high});
}

ordered_json block_json(const std::optional<MetricBlock>& block) {
  if (!block) return nullptr;
  ordered_json j;
  j["rmse"] = block->point.rmse;
  j["mae"] = block->point.mae;
  j["r2"] = optional_number(block->point.r2);
  j["rmse_ci"] = interval_json(block->rmse_ci);
  j["mae_ci"] = interval_json(block->mae_ci);
  j["r2_ci"] = interval_json(block->r2_ci);
  return j;
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fixed(const std::optional<double>& v) { return v ? fixed(*v) : "n/a"; }

std::string with_ci(double v, const std::optional<Interval>& ci) {
  std::string s = fixed(v);
  if (ci) s += " [" + fixed(ci->low) + ", " + fixed(ci->high) + "]";
  return s;
}

std::string with_ci(const std::optional<double>& v, const std::optional<Interval>& ci) {
  if (!v) return "n/a";
  return with_ci(*v, ci);
}

}  // namespace

void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows) {
  out << "date,actual_tt,predicted_tt,model,feature_set\n";
  for (const PredictionRow& r : rows) {
    const std::string fields[] = {format_date(r.date), csv::format_double(r.actual_tt),
                                  csv::format_double(r.predicted_tt), r.model, r.feature_set};
    csv::write_row(out, fields);
  }
}

std::vector<PredictionRow> read_predictions_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw DataError("predictions: empty file");
  const std::vector<std::string> expected = {"date", "actual_tt", "predicted_tt", "model", "feature_set"};
  if (fields != expected) throw DataError("predictions: unexpected header");
  std::vector<PredictionRow> rows;
  while (reader.next(fields)) {
    if (fields.size() != expected.size()) {
      throw DataError("predictions: line " + std::to_string(reader.line()) + " has the wrong field count");
    }
    PredictionRow row;
    const auto d = parse_date(fields[0]);
    if (!d) throw DataError("predictions: line " + std::to_string(reader.line()) + ": bad date");
    row.date = *d;
    row.actual_tt = parse_field(fields[1], reader.line(), "actual_tt");
    row.predicted_tt = parse_field(fields[2], reader.line(), "predicted_tt");
    row.model = fields[3];
    row.feature_set = fields[4];
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_importance_csv(std::ostream& out, const std::vector<ImportanceEntry>& entries) {
  out << "rank,feature,delta_rmse\n";
  for (size_t i = 0; i < entries.size(); ++i) {
    const std::string fields[] = {std::to_string(i + 1), entries[i].feature, csv::format_double(entries[i].delta_rmse)};
    csv::write_row(out, fields);
  }
}

std::vector<ImportanceEntry> read_importance_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  const size_t feature = table.column("feature");
  const size_t delta = table.column("delta_rmse");
  std::vector<ImportanceEntry> out;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    ImportanceEntry e;
    e.feature = table.rows[i].at(feature);
    e.delta_rmse = parse_field(table.rows[i].at(delta), i + 2, "delta_rmse");
    out.push_back(std::move(e));
  }
  return out;
}

void write_cv_table_csv(std::ostream& out, const std::vector<std::pair<std::string, GridSearchResult>>& results) {
  size_t n_folds = 0;
  for (const auto& [name, result] : results) {
    for (const CandidateResult& c : result.table) n_folds = std::max(n_folds, c.fold_rmse.size());
  }
  std::vector<std::string> header = {"feature_set",      "candidate",        "n_estimators",
                                     "learning_rate",    "max_depth",        "feature_fraction",
                                     "bagging_fraction", "min_samples_leaf"};
  for (size_t f = 0; f < n_folds; ++f) header.push_back("fold_" + std::to_string(f + 1));
  header.insert(header.end(), {"mean_rmse", "selected", "status"});
  csv::write_row(out, header);
  for (const auto& [name, result] : results) {
    for (const CandidateResult& c : result.table) {
      std::vector<std::string> row = {name,
                                      std::to_string(c.index),
                                      std::to_string(c.params.n_estimators),
                                      csv::format_double(c.params.learning_rate),
                                      std::to_string(c.params.max_depth),
                                      csv::format_double(c.params.feature_fraction),
                                      csv::format_double(c.params.bagging_fraction),
                                      std::to_string(c.params.min_samples_leaf)};
      for (size_t f = 0; f < n_folds; ++f) {
        row.push_back(f < c.fold_rmse.size() ? csv::format_double(c.fold_rmse[f]) : "");
      }
      row.push_back(c.disqualified ? "" : csv::format_double(c.mean_rmse));
      row.push_back(c.index == result.best_index ? "1" : "0");
      row.push_back(c.disqualified ? "disqualified: " + c.reason : "ok");
      csv::write_row(out, row);
    }
  }
}

std::vector<ModelRun> runs_from_predictions(const std::vector<PredictionRow>& rows) {
  std::vector<ModelRun> runs;
  for (const PredictionRow& r : rows) {
    auto it = std::find_if(runs.begin(), runs.end(), [&](const ModelRun& run) {
      return run.model == r.model && run.feature_set == r.feature_set;
    });
    if (it == runs.end()) {
      runs.push_back({r.model, r.feature_set, {}, {}, {}});
      it = runs.end() - 1;
    }
    it->dates.push_back(r.date);
    it->actual.push_back(r.actual_tt);
    it->predicted.push_back(r.predicted_tt);
  }
  return runs;
}

EvaluationReport compare_report(const std::vector<ModelRun>& runs, const ReportOptions& options) {
  if (runs.empty()) throw DataError("report: no model runs");
  double scale = 1.0;
  if (options.unit == "days") {
    scale = 1.0 / 24.0;
  } else if (options.unit != "hours") {
    throw ConfigError("report unit must be hours or days, got '" + options.unit + "'");
  }
  EvaluationReport report;
  report.unit = options.unit;
  report.holdout_dates = runs.front().dates;
  std::vector<ModelRun> scaled;
  for (const ModelRun& run : runs) {
    if (run.dates != report.holdout_dates) {
      throw DataError("report: holdout dates of " + run.model + "/" + run.feature_set + " differ from " +
                      runs.front().model + "/" + runs.front().feature_set);
    }
    ModelRun s = run;
    for (double& v : s.actual) v *= scale;
    for (double& v : s.predicted) v *= scale;
    scaled.push_back(std::move(s));
  }
  for (const char* model : kModelOrder) {
    ReportRow row;
    row.model = model;
    for (const ModelRun& run : scaled) {
      if (run.model != model) continue;
      if (run.feature_set == "actor") {
        row.actor = score(run, options.bootstrap);
      } else {
        row.baseline = score(run, options.bootstrap);
      }
    }
    if (!row.baseline && !row.actor) continue;
    if (row.baseline && row.actor) {
      Metrics d;
      d.rmse = row.baseline->point.rmse - row.actor->point.rmse;
      d.mae = row.baseline->point.mae - row.actor->point.mae;
      if (row.baseline->point.r2 && row.actor->point.r2) d.r2 = *row.actor->point.r2 - *row.baseline->point.r2;
      row.delta = d;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

ordered_json report_to_json(const EvaluationReport& report) {
  ordered_json j;
  j["unit"] = report.unit;
  ordered_json holdout;
  holdout["days"] = report.holdout_dates.size();
  holdout["first_date"] = report.holdout_dates.empty() ? "" : format_date(report.holdout_dates.front());
  holdout["last_date"] = report.holdout_dates.empty() ? "" : format_date(report.holdout_dates.back());
  j["holdout"] = holdout;
  ordered_json rows = ordered_json::array();
  for (const ReportRow& r : report.rows) {
    ordered_json row;
    row["model"] = r.model;
    row["baseline"] = block_json(r.baseline);
    row["actor"] = block_json(r.actor);
    if (r.delta) {
      row["delta"] = {{"rmse", r.delta->rmse}, {"mae", r.delta->mae}, {"r2", optional_number(r.delta->r2)}};
    } else {
      row["delta"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  j["models"] = std::move(rows);
  if (!report.importance.empty()) {
    ordered_json imp = ordered_json::array();
    for (const ImportanceEntry& e : report.importance) imp.push_back({{"feature", e.feature}, {"delta_rmse", e.delta_rmse}});
    j["importance"] = {{"model", report.importance_model}, {"features", std::move(imp)}};
  }
  return j;
}

std::string render_report_markdown(const EvaluationReport& report) {
  std::ostringstream out;
  out << "# Next-day throughput time forecast\n\n";
  out << "Holdout: " << report.holdout_dates.size() << " days";
  if (!report.holdout_dates.empty()) {
    out << " (" << format_date(report.holdout_dates.front()) << " to " << format_date(report.holdout_dates.back())
        << ")";
  }
  out << ". Errors in " << report.unit << ", 95% bootstrap intervals in brackets.\n\n";
  out << "| Model | Metric | Baseline | Actor | Delta |\n";
  out << "|---|---|---|---|---|\n";
  for (const ReportRow& r : report.rows) {
    const std::string name = r.model == "gbt" ? "GBT" : r.model == "ar_diff" ? "AR on differences (benchmark)"
                                                                               : "Random walk (benchmark)";
    auto cell = [](const std::optional<MetricBlock>& b, int metric) -> std::string {
      if (!b) return "--";
      if (metric == 0) return with_ci(b->point.rmse, b->rmse_ci);
      if (metric == 1) return with_ci(b->point.mae, b->mae_ci);
      return with_ci(b->point.r2, b->r2_ci);
    };
    auto delta = [&](int metric) -> std::string {
      if (!r.delta) return "--";
      if (metric == 0) return fixed(r.delta->rmse);
      if (metric == 1) return fixed(r.delta->mae);
      return fixed(r.delta->r2);
    };
    const char* names[] = {"RMSE", "MAE", "R2"};
    for (int m = 0; m < 3; ++m) {
      out << "| " << (m == 0 ? name : "") << " | " << names[m] << " | " << cell(r.baseline, m) << " | "
          << cell(r.actor, m) << " | " << delta(m) << " |\n";
    }
  }
  out << "\nDelta is baseline minus actor for RMSE and MAE, actor minus baseline for R2; positive favours the "
         "actor-enriched features.\n";
  if (!report.importance.empty()) {
    out << "\n## Permutation importance (" << report.importance_model << ")\n\n";
    out << "| Rank | Feature | Increase in RMSE (hours) |\n|---|---|---|\n";
    for (size_t i = 0; i < report.importance.size() && i < 15; ++i) {
      out << "| " << i + 1 << " | " << report.importance[i].feature << " | " << fixed(report.importance[i].delta_rmse)
          << " |\n";
    }
  }
  return out.str();
}

}  // namespace actorcast
