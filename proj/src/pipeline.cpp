#include "actorcast/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "actorcast/behavior.hpp"
#include "actorcast/errors.hpp"
#include "actorcast/evaluation.hpp"
#include "actorcast/event_log.hpp"
#include "actorcast/features.hpp"
#include "actorcast/models.hpp"
#include "actorcast/report.hpp"
#include "actorcast/rng.hpp"
#include "actorcast/timeseries.hpp"

namespace actorcast {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kEvents = "events.csv";
constexpr const char* kIngestReport = "ingest_report.json";
constexpr const char* kTransitions = "transitions.csv";
constexpr const char* kPanel = "panel.csv";
constexpr const char* kCvTable = "cv_table.csv";
constexpr const char* kBestParams = "best_params.json";
constexpr const char* kPredictions = "predictions.csv";
constexpr const char* kImportance = "importance.csv";
constexpr const char* kMetrics = "metrics.json";
constexpr const char* kReportMd = "report.md";
constexpr const char* kManifest = "run_manifest.json";

std::string features_file(FeatureSet set) { return "features_" + std::string(feature_set_name(set)) + ".csv"; }
std::string gbt_model_file(FeatureSet set) { return "model_gbt_" + std::string(feature_set_name(set)) + ".json"; }
constexpr const char* kArModel = "model_ar_diff.json";
constexpr const char* kNaiveModel = "model_naive.json";

std::vector<FeatureSet> selected_sets(const RunConfig& config) {
  switch (config.feature_sets) {
    case FeatureSelection::kBaseline: return {FeatureSet::kBaseline};
    case FeatureSelection::kActor: return {FeatureSet::kActorEnriched};
    case FeatureSelection::kBoth: return {FeatureSet::kBaseline, FeatureSet::kActorEnriched};
  }
  return {};
}

class Stage {
 public:
  Stage(const RunConfig& config, const LogFn& log) : config_(config), log_(log), dir_(config.output_directory) {}

  void info(const std::string& message) const {
    if (log_) log_(message);
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  std::ifstream open(const std::string& name) const {
    const fs::path p = path(name);
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("missing upstream artifact " + p.string());
    return in;
  }

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    const fs::path p = path(name);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + p.string());
    result.written.push_back(name);
  }

  void write_json(const std::string& name, const ordered_json& doc) { write(name, doc.dump(2) + "\n"); }

  json read_json(const std::string& name) const {
    std::ifstream in = open(name);
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw DataError(name + ": " + e.what());
    }
  }

  EventLog read_events() const {
    std::ifstream in = open(kEvents);
    ParseOptions opts;
    opts.max_error_fraction = 0.0;
    opts.source_name = kEvents;
    return parse_csv(in, opts).log;
  }

  SeriesPanel read_panel() const {
    std::ifstream in = open(kPanel);
    return read_panel_csv(in);
  }

  FeatureMatrix read_features(FeatureSet set) const {
    std::ifstream in = open(features_file(set));
    return read_feature_matrix_csv(in, set);
  }

  TrainedModel read_model(const std::string& name) const { return model_from_json(read_json(name)); }

  const RunConfig& config_;
  const LogFn& log_;
  fs::path dir_;
  StageResult result;
};

// ---------------------------------------------------------------------------

void stage_ingest(Stage& s) {
  const DatasetConfig& d = s.config_.dataset;
  ParseOptions opts;
  opts.mapping = d.columns;
  opts.timestamp_format = d.timestamp_format;
  opts.naive_utc_offset_minutes = d.utc_offset_minutes;
  opts.max_error_fraction = d.max_error_fraction;
  opts.source_name = fs::path(d.path).filename().string();
  if (!fs::exists(d.path)) throw DataError("dataset not found: " + d.path);
  const ParsedLog parsed = read_log_file(d.path, d.format, opts);
  if (parsed.log.empty()) throw DataError("dataset contains no events");
  std::ostringstream out;
  write_canonical_csv(out, parsed.log);
  s.write(kEvents, out.str());

  const LogSummary summary = log_summary(parsed.log);
  ordered_json report;
  report["records_read"] = parsed.report.records_read;
  report["skipped"] = parsed.report.skipped;
  ordered_json errors = ordered_json::array();
  for (const RowError& e : parsed.report.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
  report["errors"] = errors;
  report["unknown_resources"] = parsed.report.unknown_resources;
  report["synthesized_case_ids"] = parsed.report.synthesized_case_ids;
  report["warnings"] = parsed.report.warnings;
  report["events"] = summary.n_events;
  report["cases"] = summary.n_cases;
  report["resources"] = summary.n_resources;
  report["activities"] = summary.n_activities;
  s.write_json(kIngestReport, report);
  s.result.diagnostics = report;
  s.info("ingest: " + std::to_string(summary.n_events) + " events, " + std::to_string(summary.n_cases) +
         " cases, " + std::to_string(parsed.report.skipped) + " rows skipped");
}

void stage_enrich(Stage& s) {
  const EventLog log = s.read_events();
  const std::vector<Transition> transitions = classify_transitions(log);
  std::ostringstream out;
  write_transitions_csv(out, transitions);
  s.write(kTransitions, out.str());
  ordered_json counts;
  for (BehaviorType b : kBehaviorTypes) {
    counts[std::string(behavior_code(b))] =
        std::count_if(transitions.begin(), transitions.end(), [b](const Transition& t) { return t.behavior == b; });
  }
  s.result.diagnostics = {{"transitions", transitions.size()}, {"by_behavior", counts}};
  s.info("enrich: " + std::to_string(transitions.size()) + " transitions");
}

void stage_panel(Stage& s) {
  const EventLog log = s.read_events();
  std::vector<Transition> transitions;
  {
    std::ifstream in = s.open(kTransitions);
    transitions = read_transitions_csv(in);
  }
  size_t trimmed_cases = 0;
  const EventLog retained = trim_boundary_cases(log, s.config_.dataset.trim_boundary_days, &trimmed_cases);
  PanelOptions opts;
  opts.dense_calendar = s.config_.features.dense_calendar;
  const AssembledPanel assembled = assemble_panel(retained, transitions, opts);
  std::ostringstream out;
  write_panel_csv(out, assembled.panel);
  s.write(kPanel, out.str());
  const PanelDiagnostics& d = assembled.diagnostics;
  s.result.diagnostics = {{"days", assembled.panel.size()},
                          {"trimmed_cases", trimmed_cases},
                          {"total_transitions", d.total_transitions},
                          {"dropped_transitions", d.dropped_transitions},
                          {"calendar_gap_days", d.calendar_gap_days},
                          {"filled_days", d.filled_days}};
  s.info("panel: " + std::to_string(assembled.panel.size()) + " days, " + std::to_string(d.dropped_transitions) +
         " transitions off-calendar");
}

void stage_features(Stage& s) {
  const SeriesPanel panel = s.read_panel();
  const FeatureOptions opts = s.config_.feature_options();
  ordered_json diag;
  for (FeatureSet set : selected_sets(s.config_)) {
    const FeatureMatrix m = build_feature_matrix(panel, set, opts);
    std::ostringstream out;
    write_feature_matrix_csv(out, m);
    s.write(features_file(set), out.str());
    diag[std::string(feature_set_name(set))] = {{"rows", m.rows()}, {"columns", m.cols()}};
    s.info("features: " + std::string(feature_set_name(set)) + " " + std::to_string(m.rows()) + " x " +
           std::to_string(m.cols()));
  }
  diag["lookahead_features"] = lookahead_features(opts);
  s.result.diagnostics = diag;
}

ordered_json params_json(const GBTParams& p) {
  return {{"n_estimators", p.n_estimators},         {"learning_rate", p.learning_rate},
          {"max_depth", p.max_depth},               {"feature_fraction", p.feature_fraction},
          {"bagging_fraction", p.bagging_fraction}, {"min_samples_leaf", p.min_samples_leaf},
          {"seed", p.seed}};
}

GBTParams params_from_json(const json& j) {
  GBTParams p;
  p.n_estimators = j.at("n_estimators").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.max_depth = j.at("max_depth").get<int>();
  p.feature_fraction = j.at("feature_fraction").get<double>();
  p.bagging_fraction = j.at("bagging_fraction").get<double>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

void stage_tune(Stage& s) {
  const RunConfig& c = s.config_;
  const std::vector<GBTParams> grid = expand_grid(c.models.grid, c.models.seed);
  std::vector<std::pair<std::string, GridSearchResult>> results;
  ordered_json best;
  for (FeatureSet set : selected_sets(c)) {
    const FeatureMatrix all = s.read_features(set);
    const ChronoSplit split = chrono_split(all, c.evaluation.train_fraction);
    const FoldPlan folds = ts_cv_folds(split.train.rows(), c.evaluation.folds);
    s.info("tune: " + std::string(feature_set_name(set)) + " " + std::to_string(grid.size()) + " candidates x " +
           std::to_string(folds.folds.size()) + " folds");
    GridSearchResult r = grid_search(split.train, grid, folds, c.threads);
    best[std::string(feature_set_name(set))] = params_json(r.best);
    results.emplace_back(std::string(feature_set_name(set)), std::move(r));
  }
  std::ostringstream out;
  write_cv_table_csv(out, results);
  s.write(kCvTable, out.str());
  s.write_json(kBestParams, best);
  s.result.diagnostics = {{"candidates", grid.size()}, {"best", best}};
}

/// TT levels available to the benchmark: every panel day up to the target day of the
/// last training origin.
std::vector<double> ar_training_levels(const SeriesPanel& panel, const FeatureMatrix& train) {
  const Date last = train.origin_dates.back();
  const auto it = std::find(panel.calendar.dates.begin(), panel.calendar.dates.end(), last);
  if (it == panel.calendar.dates.end()) throw DataError("feature origin " + format_date(last) + " not in panel");
  const size_t end = static_cast<size_t>(it - panel.calendar.dates.begin()) + 2;
  return {panel.tt.begin(), panel.tt.begin() + static_cast<std::ptrdiff_t>(std::min(end, panel.tt.size()))};
}

void stage_train(Stage& s) {
  const RunConfig& c = s.config_;
  const json best = s.read_json(kBestParams);
  ordered_json diag;
  FeatureMatrix reference_train;
  for (FeatureSet set : selected_sets(c)) {
    const std::string name(feature_set_name(set));
    if (!best.contains(name)) throw DataError(std::string(kBestParams) + " has no entry for " + name);
    const ChronoSplit split = chrono_split(s.read_features(set), c.evaluation.train_fraction);
    const TrainedModel model = fit_gbt(split.train, params_from_json(best.at(name)));
    s.write(gbt_model_file(set), model_to_json(model).dump() + "\n");
    diag["gbt_" + name] = {{"trees", model.ensemble.trees.size()}, {"train_rows", split.train.rows()}};
    reference_train = split.train;
  }
  const SeriesPanel panel = s.read_panel();
  const TrainedModel ar = fit_ar_diff(ar_training_levels(panel, reference_train), c.models.ar_p_max);
  s.write(kArModel, model_to_json(ar).dump(2) + "\n");
  s.write(kNaiveModel, model_to_json(fit_naive()).dump(2) + "\n");
  diag["ar_diff"] = {{"order", ar.ar.order}, {"aic", ar.ar.aic}, {"warnings", ar.ar.warnings}};
  for (const std::string& w : ar.ar.warnings) s.info("train: " + w);
  s.result.diagnostics = diag;
}

/// Calendar step following each origin: the day being forecast.
std::vector<Date> target_dates(const SeriesPanel& panel, const std::vector<Date>& origins) {
  std::vector<Date> out;
  for (Date d : origins) {
    const auto it = std::lower_bound(panel.calendar.dates.begin(), panel.calendar.dates.end(), d);
    if (it == panel.calendar.dates.end() || *it != d || it + 1 == panel.calendar.dates.end()) {
      throw DataError("feature origin " + format_date(d) + " has no following day in the panel");
    }
    out.push_back(*(it + 1));
  }
  return out;
}

void stage_evaluate(Stage& s) {
  const RunConfig& c = s.config_;
  const SeriesPanel panel = s.read_panel();
  std::vector<PredictionRow> rows;
  ordered_json clamped;
  auto emit = [&](const TrainedModel& model, const FeatureMatrix& holdout, const std::string& model_name,
                  const std::string& set_name) {
    const Reconstruction rec = forecast_tt(model, holdout);
    const std::vector<Date> dates = target_dates(panel, holdout.origin_dates);
    for (size_t i = 0; i < holdout.rows(); ++i) {
      rows.push_back({dates[i], holdout.actual_next_tt[i], rec.tt[i], model_name, set_name});
    }
    clamped[model_name + (set_name.empty() ? "" : "_" + set_name)] = rec.clamped;
  };
  FeatureMatrix reference_holdout;
  for (FeatureSet set : selected_sets(c)) {
    const ChronoSplit split = chrono_split(s.read_features(set), c.evaluation.train_fraction);
    emit(s.read_model(gbt_model_file(set)), split.holdout, "gbt", std::string(feature_set_name(set)));
    reference_holdout = split.holdout;
  }
  emit(s.read_model(kArModel), reference_holdout, "ar_diff", "");
  emit(s.read_model(kNaiveModel), reference_holdout, "naive", "");
  std::ostringstream out;
  write_predictions_csv(out, rows);
  s.write(kPredictions, out.str());
  s.result.diagnostics = {{"holdout_rows", reference_holdout.rows()}, {"clamped_forecasts", clamped}};
}

FeatureSet importance_set(const RunConfig& c) {
  return c.feature_sets == FeatureSelection::kBaseline ? FeatureSet::kBaseline : FeatureSet::kActorEnriched;
}

void stage_importance(Stage& s) {
  const RunConfig& c = s.config_;
  const FeatureSet set = importance_set(c);
  const ChronoSplit split = chrono_split(s.read_features(set), c.evaluation.train_fraction);
  const TrainedModel model = s.read_model(gbt_model_file(set));
  const std::vector<ImportanceEntry> entries =
      permutation_importance(model, split.holdout, c.evaluation.importance_repeats, c.models.seed, c.threads);
  std::ostringstream out;
  write_importance_csv(out, entries);
  s.write(kImportance, out.str());
  s.result.diagnostics = {{"model", "gbt_" + std::string(feature_set_name(set))}, {"features", entries.size()}};
}

void stage_report(Stage& s) {
  const RunConfig& c = s.config_;
  std::vector<PredictionRow> predictions;
  {
    std::ifstream in = s.open(kPredictions);
    predictions = read_predictions_csv(in);
  }
  ReportOptions opts;
  opts.unit = c.dataset.report_unit;
  opts.bootstrap.samples = c.evaluation.bootstrap_samples;
  opts.bootstrap.alpha = c.evaluation.bootstrap_alpha;
  opts.bootstrap.block_length = c.evaluation.block_length;
  opts.bootstrap.seed = derive_seed(c.models.seed, "bootstrap");
  EvaluationReport report = compare_report(runs_from_predictions(predictions), opts);
  if (fs::exists(s.path(kImportance))) {
    std::ifstream in = s.open(kImportance);
    report.importance = read_importance_csv(in);
    if (report.importance.size() > 20) report.importance.resize(20);
    report.importance_model = "gbt_" + std::string(feature_set_name(importance_set(c)));
  }
  s.write_json(kMetrics, report_to_json(report));
  s.write(kReportMd, render_report_markdown(report));
  ordered_json diag;
  for (const ReportRow& r : report.rows) {
    if (r.baseline) diag[r.model + (r.actor ? "_baseline" : "") + "_rmse"] = r.baseline->point.rmse;
    if (r.actor) diag[r.model + "_actor_rmse"] = r.actor->point.rmse;
  }
  s.result.diagnostics = diag;
}

using StageFn = void (*)(Stage&);

struct StageEntry {
  const char* name;
  StageFn fn;
};

constexpr StageEntry kStages[] = {
    {"ingest", stage_ingest}, {"enrich", stage_enrich}, {"panel", stage_panel},
    {"features", stage_features}, {"tune", stage_tune}, {"train", stage_train},
    {"evaluate", stage_evaluate}, {"importance", stage_importance}, {"report", stage_report},
};

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const StageEntry& e : kStages) v.emplace_back(e.name);
    return v;
  }();
  return names;
}

StageResult run_stage(const std::string& stage, const RunConfig& config, const LogFn& log) {
  const auto it = std::find_if(std::begin(kStages), std::end(kStages),
                               [&](const StageEntry& e) { return stage == e.name; });
  if (it == std::end(kStages)) throw StageError(stage, FailureKind::kConfig, "unknown stage");
  Stage s(config, log);
  try {
    it->fn(s);
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(stage, FailureKind::kConfig, e.what());
  } catch (const DataError& e) {
    throw StageError(stage, FailureKind::kData, e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, FailureKind::kPipeline, e.what());
  }
  return std::move(s.result);
}

void run_pipeline(const RunConfig& config, const LogFn& log) {
  const fs::path dir = config.output_directory;
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".partial") fs::remove(entry.path());
  }
  std::vector<std::string> written;
  ordered_json timings, diagnostics;
  const auto started = std::chrono::steady_clock::now();
  for (const std::string& name : stage_names()) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      StageResult r = run_stage(name, config, log);
      written.insert(written.end(), r.written.begin(), r.written.end());
      diagnostics[name] = std::move(r.diagnostics);
    } catch (const StageError&) {
      for (const std::string& f : written) {
        std::error_code ec;
        fs::rename(dir / f, dir / (f + ".partial"), ec);
      }
      throw;
    }
    timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(config);
  manifest["threads"] = config.threads;
  const std::uint64_t seed = config.models.seed;
  manifest["seeds"] = {
      {"global", seed},
      {"gbt", {{"seed", seed}, {"per_round", "derive_seed(seed, \"gbt_round\", round)"}}},
      {"bootstrap", derive_seed(seed, "bootstrap")},
      {"importance", {{"seed", seed}, {"per_shuffle", "derive_seed(seed, \"importance\", feature_index, repeat)"}}},
  };
  manifest["artifacts"] = written;
  manifest["timings_seconds"] = timings;
  manifest["diagnostics"] = diagnostics;
  std::ofstream out(dir / kManifest, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << "\n";
  if (!out) throw StageError("report", FailureKind::kPipeline, "cannot write run_manifest.json");
}

}  // namespace actorcast
