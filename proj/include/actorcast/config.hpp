#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "actorcast/evaluation.hpp"
#include "actorcast/event_log.hpp"
#include "actorcast/features.hpp"

namespace actorcast {

struct DatasetConfig {
  std::string path;
  std::string format = "auto";  // auto, csv, xes
  ColumnMapping columns;
  std::string timestamp_format = "auto";
  int utc_offset_minutes = 0;
  std::string report_unit = "hours";
  int trim_boundary_days = 0;
  double max_error_fraction = 0.01;
};

struct FeaturesConfig {
  PeakMode peak_mode = PeakMode::kPaper;
  std::optional<double> peak_prominence;
  int peak_min_distance = 7;
  bool dense_calendar = false;
};

struct ModelsConfig {
  GridSpec grid;
  int ar_p_max = 5;
  std::uint64_t seed = 42;
};

struct EvaluationConfig {
  double train_fraction = 0.8;
  int folds = 5;
  int bootstrap_samples = 1000;
  double bootstrap_alpha = 0.05;
  int block_length = 0;  // 0 = i.i.d. days
  int importance_repeats = 10;
};

enum class FeatureSelection { kBaseline, kActor, kBoth };
std::string_view feature_selection_name(FeatureSelection s);
FeatureSelection parse_feature_selection(std::string_view text);

struct RunConfig {
  DatasetConfig dataset;
  FeaturesConfig features;
  ModelsConfig models;
  EvaluationConfig evaluation;
  std::string output_directory = "out";
  FeatureSelection feature_sets = FeatureSelection::kBoth;
  unsigned threads = 1;

  FeatureOptions feature_options() const;
};

/// Parses YAML text. Unknown keys and out-of-range values raise ConfigError naming
/// the offending field. Relative dataset paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Re-checks every constraint (used after command-line overrides).
void validate_config(const RunConfig& config);

nlohmann::ordered_json config_to_json(const RunConfig& config);

}  // namespace actorcast
