#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "actorcast/config.hpp"

namespace actorcast {

inline constexpr const char* kVersion = "1.0.0";

/// Stage names in execution order.
const std::vector<std::string>& stage_names();

enum class FailureKind { kConfig, kData, kPipeline };

/// A stage aborted. `kind` classifies the root cause for exit-code mapping.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, FailureKind kind, const std::string& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)), kind_(kind) {}
  const std::string& stage() const { return stage_; }
  FailureKind kind() const { return kind_; }

 private:
  std::string stage_;
  FailureKind kind_;
};

using LogFn = std::function<void(const std::string&)>;

struct StageResult {
  std::vector<std::string> written;     // artifact file names inside the output directory
  nlohmann::ordered_json diagnostics;   // stage-specific counters
};

/// Runs one stage against the artifacts already present in config.output_directory.
/// Missing inputs raise StageError naming the expected file.
StageResult run_stage(const std::string& stage, const RunConfig& config, const LogFn& log = {});

/// Runs every stage in order and writes run_manifest.json. On failure every artifact
/// written by this run is renamed with a `.partial` suffix and the StageError is rethrown.
void run_pipeline(const RunConfig& config, const LogFn& log = {});

}  // namespace actorcast
