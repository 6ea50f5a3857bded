#include "actorcast/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "actorcast/errors.hpp"

namespace actorcast {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, const std::string& where, T& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("invalid value for '" + where + "." + key + "'");
  }
}

template <typename T>
void read_list(const YAML::Node& node, const char* key, const std::string& where, std::vector<T>& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    if (v.IsSequence()) {
      out = v.as<std::vector<T>>();
    } else {
      out = {v.as<T>()};
    }
  } catch (const YAML::Exception&) {
    throw ConfigError("invalid value for '" + where + "." + key + "'");
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool open_fraction(double v) { return v > 0.0 && v < 1.0; }

}  // namespace

std::string_view feature_selection_name(FeatureSelection s) {
  switch (s) {
    case FeatureSelection::kBaseline: return "baseline";
    case FeatureSelection::kActor: return "actor";
    case FeatureSelection::kBoth: return "both";
  }
  return "?";
}

FeatureSelection parse_feature_selection(std::string_view text) {
  if (text == "baseline") return FeatureSelection::kBaseline;
  if (text == "actor") return FeatureSelection::kActor;
  if (text == "both") return FeatureSelection::kBoth;
  throw ConfigError("feature set must be baseline, actor or both, got '" + std::string(text) + "'");
}

FeatureOptions RunConfig::feature_options() const {
  FeatureOptions o;
  o.peak_mode = features.peak_mode;
  o.peaks.min_distance = static_cast<size_t>(features.peak_min_distance);
  o.peaks.prominence_threshold = features.peak_prominence;
  return o;
}

void validate_config(const RunConfig& c) {
  const DatasetConfig& d = c.dataset;
  require(!d.path.empty(), "dataset.path is required");
  require(d.format == "auto" || d.format == "csv" || d.format == "xes", "dataset.format must be auto, csv or xes");
  require(d.report_unit == "hours" || d.report_unit == "days", "dataset.report_unit must be hours or days");
  require(d.trim_boundary_days >= 0, "dataset.trim_boundary_days must be >= 0");
  require(d.max_error_fraction >= 0.0 && d.max_error_fraction < 1.0, "dataset.max_error_fraction must be in [0, 1)");
  require(d.utc_offset_minutes > -24 * 60 && d.utc_offset_minutes < 24 * 60,
          "dataset.utc_offset_minutes must be within one day");
  require(!d.timestamp_format.empty(), "dataset.timestamp_format must not be empty");

  require(c.features.peak_min_distance >= 1, "features.peak_min_distance must be >= 1");
  require(!c.features.peak_prominence || *c.features.peak_prominence >= 0.0,
          "features.peak_prominence must be >= 0");

  const GridSpec& g = c.models.grid;
  require(!g.n_estimators.empty() && !g.learning_rate.empty() && !g.max_depth.empty() &&
              !g.feature_fraction.empty() && !g.bagging_fraction.empty(),
          "models.grid: every list must be non-empty");
  for (int n : g.n_estimators) require(n >= 1, "models.grid.n_estimators must be >= 1");
  for (double v : g.learning_rate) require(v > 0.0 && v <= 1.0, "models.grid.learning_rate must be in (0, 1]");
  for (int v : g.max_depth) require(v >= 1, "models.grid.max_depth must be >= 1");
  for (double v : g.feature_fraction) require(v > 0.0 && v <= 1.0, "models.grid.feature_fraction must be in (0, 1]");
  for (double v : g.bagging_fraction) require(v > 0.0 && v <= 1.0, "models.grid.bagging_fraction must be in (0, 1]");
  require(g.min_samples_leaf >= 1, "models.grid.min_samples_leaf must be >= 1");
  require(c.models.ar_p_max >= 0 && c.models.ar_p_max <= kMaxLag - 1, "models.ar_p_max must be in [0, 19]");

  const EvaluationConfig& e = c.evaluation;
  require(open_fraction(e.train_fraction), "evaluation.train_fraction must be in (0, 1)");
  require(e.folds >= 1, "evaluation.folds must be >= 1");
  require(e.bootstrap_samples >= 1, "evaluation.bootstrap_samples must be >= 1");
  require(open_fraction(e.bootstrap_alpha), "evaluation.bootstrap_alpha must be in (0, 1)");
  require(e.block_length >= 0, "evaluation.block_length must be >= 0");
  require(e.importance_repeats >= 1, "evaluation.importance_repeats must be >= 1");

  require(!c.output_directory.empty(), "output.directory must not be empty");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig c;
  if (root.IsNull()) throw ConfigError("config is empty");
  check_keys(root, "", {"dataset", "features", "models", "evaluation", "output", "run"});

  if (const YAML::Node n = root["dataset"]) {
    check_keys(n, "dataset",
               {"path", "format", "columns", "timestamp_format", "utc_offset_minutes", "report_unit",
                "trim_boundary_days", "max_error_fraction"});
    DatasetConfig& d = c.dataset;
    read(n, "path", "dataset", d.path);
    read(n, "format", "dataset", d.format);
    read(n, "timestamp_format", "dataset", d.timestamp_format);
    read(n, "utc_offset_minutes", "dataset", d.utc_offset_minutes);
    read(n, "report_unit", "dataset", d.report_unit);
    read(n, "trim_boundary_days", "dataset", d.trim_boundary_days);
    read(n, "max_error_fraction", "dataset", d.max_error_fraction);
    if (const YAML::Node cols = n["columns"]) {
      check_keys(cols, "dataset.columns", {"case_id", "activity", "timestamp", "resource"});
      read(cols, "case_id", "dataset.columns", d.columns.case_column);
      read(cols, "activity", "dataset.columns", d.columns.activity_column);
      read(cols, "timestamp", "dataset.columns", d.columns.timestamp_column);
      read(cols, "resource", "dataset.columns", d.columns.resource_column);
    }
  }
  if (const YAML::Node n = root["features"]) {
    check_keys(n, "features", {"peak_mode", "peak_prominence", "peak_min_distance", "dense_calendar"});
    std::string mode = "paper";
    read(n, "peak_mode", "features", mode);
    if (mode == "paper") {
      c.features.peak_mode = PeakMode::kPaper;
    } else if (mode == "causal") {
      c.features.peak_mode = PeakMode::kCausal;
    } else {
      throw ConfigError("features.peak_mode must be paper or causal, got '" + mode + "'");
    }
    if (n["peak_prominence"] && !n["peak_prominence"].IsNull()) {
      double p = 0.0;
      read(n, "peak_prominence", "features", p);
      c.features.peak_prominence = p;
    }
    read(n, "peak_min_distance", "features", c.features.peak_min_distance);
    read(n, "dense_calendar", "features", c.features.dense_calendar);
  }
  if (const YAML::Node n = root["models"]) {
    check_keys(n, "models", {"grid", "ar_p_max", "seed"});
    if (const YAML::Node g = n["grid"]) {
      check_keys(g, "models.grid",
                 {"n_estimators", "learning_rate", "max_depth", "feature_fraction", "bagging_fraction",
                  "min_samples_leaf"});
      read_list(g, "n_estimators", "models.grid", c.models.grid.n_estimators);
      read_list(g, "learning_rate", "models.grid", c.models.grid.learning_rate);
      read_list(g, "max_depth", "models.grid", c.models.grid.max_depth);
      read_list(g, "feature_fraction", "models.grid", c.models.grid.feature_fraction);
      read_list(g, "bagging_fraction", "models.grid", c.models.grid.bagging_fraction);
      read(g, "min_samples_leaf", "models.grid", c.models.grid.min_samples_leaf);
    }
    read(n, "ar_p_max", "models", c.models.ar_p_max);
    read(n, "seed", "models", c.models.seed);
  }
  if (const YAML::Node n = root["evaluation"]) {
    check_keys(n, "evaluation",
               {"train_fraction", "folds", "bootstrap_samples", "bootstrap_alpha", "block_length",
                "importance_repeats"});
    EvaluationConfig& e = c.evaluation;
    read(n, "train_fraction", "evaluation", e.train_fraction);
    read(n, "folds", "evaluation", e.folds);
    read(n, "bootstrap_samples", "evaluation", e.bootstrap_samples);
    read(n, "bootstrap_alpha", "evaluation", e.bootstrap_alpha);
    read(n, "block_length", "evaluation", e.block_length);
    read(n, "importance_repeats", "evaluation", e.importance_repeats);
  }
  if (const YAML::Node n = root["output"]) {
    check_keys(n, "output", {"directory"});
    read(n, "directory", "output", c.output_directory);
  }
  if (const YAML::Node n = root["run"]) {
    check_keys(n, "run", {"feature_sets", "threads"});
    std::string sets = "both";
    read(n, "feature_sets", "run", sets);
    c.feature_sets = parse_feature_selection(sets);
    read(n, "threads", "run", c.threads);
  }

  namespace fs = std::filesystem;
  if (!base_dir.empty()) {
    if (!c.dataset.path.empty() && fs::path(c.dataset.path).is_relative()) {
      c.dataset.path = (fs::path(base_dir) / c.dataset.path).lexically_normal().string();
    }
    if (fs::path(c.output_directory).is_relative()) {
      c.output_directory = (fs::path(base_dir) / c.output_directory).lexically_normal().string();
    }
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  const DatasetConfig& d = c.dataset;
  j["dataset"] = {{"path", d.path},
                  {"format", d.format},
                  {"columns",
                   {{"case_id", d.columns.case_column},
                    {"activity", d.columns.activity_column},
                    {"timestamp", d.columns.timestamp_column},
                    {"resource", d.columns.resource_column}}},
                  {"timestamp_format", d.timestamp_format},
                  {"utc_offset_minutes", d.utc_offset_minutes},
                  {"report_unit", d.report_unit},
                  {"trim_boundary_days", d.trim_boundary_days},
                  {"max_error_fraction", d.max_error_fraction}};
  nlohmann::ordered_json prominence = nullptr;
  if (c.features.peak_prominence) prominence = *c.features.peak_prominence;
  j["features"] = {{"peak_mode", c.features.peak_mode == PeakMode::kPaper ? "paper" : "causal"},
                   {"peak_prominence", prominence},
                   {"peak_min_distance", c.features.peak_min_distance},
                   {"dense_calendar", c.features.dense_calendar}};
  const GridSpec& g = c.models.grid;
  j["models"] = {{"grid",
                  {{"n_estimators", g.n_estimators},
                   {"learning_rate", g.learning_rate},
                   {"max_depth", g.max_depth},
                   {"feature_fraction", g.feature_fraction},
                   {"bagging_fraction", g.bagging_fraction},
                   {"min_samples_leaf", g.min_samples_leaf}}},
                 {"ar_p_max", c.models.ar_p_max},
                 {"seed", c.models.seed}};
  const EvaluationConfig& e = c.evaluation;
  j["evaluation"] = {{"train_fraction", e.train_fraction},     {"folds", e.folds},
                     {"bootstrap_samples", e.bootstrap_samples}, {"bootstrap_alpha", e.bootstrap_alpha},
                     {"block_length", e.block_length},         {"importance_repeats", e.importance_repeats}};
  j["output"] = {{"directory", c.output_directory}};
  j["run"] = {{"feature_sets", feature_selection_name(c.feature_sets)}};
  return j;
}

}  // namespace actorcast
