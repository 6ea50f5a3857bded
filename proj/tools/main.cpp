#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "actorcast/config.hpp"
#include "actorcast/errors.hpp"
#include "actorcast/event_log.hpp"
#include "actorcast/pipeline.hpp"
#include "actorcast/time.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitPipeline = 4;

struct Overrides {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string feature_set;
  std::optional<unsigned> threads;
  bool quiet = false;
};

actorcast::RunConfig load(const Overrides& o) {
  actorcast::RunConfig config = actorcast::load_config(o.config_path);
  if (!o.out.empty()) config.output_directory = o.out;
  if (o.seed) config.models.seed = *o.seed;
  if (!o.feature_set.empty()) config.feature_sets = actorcast::parse_feature_selection(o.feature_set);
  if (o.threads) config.threads = *o.threads;
  actorcast::validate_config(config);
  return config;
}

int exit_code(actorcast::FailureKind kind) {
  switch (kind) {
    case actorcast::FailureKind::kConfig: return kExitConfig;
    case actorcast::FailureKind::kData: return kExitData;
    case actorcast::FailureKind::kPipeline: return kExitPipeline;
  }
  return kExitPipeline;
}

int print_summary(const std::string& path, const std::string& format) {
  actorcast::ParseOptions opts;
  opts.source_name = path;
  const actorcast::ParsedLog parsed = actorcast::read_log_file(path, format, opts);
  const actorcast::LogSummary s = actorcast::log_summary(parsed.log);
  std::cout << "events:     " << s.n_events << "\n"
            << "cases:      " << s.n_cases << "\n"
            << "resources:  " << s.n_resources << "\n"
            << "activities: " << s.n_activities << "\n";
  if (s.span) {
    std::cout << "first:      " << actorcast::format_timestamp(s.span->first) << "\n"
              << "last:       " << actorcast::format_timestamp(s.span->second) << "\n";
  }
  std::cout << "skipped:    " << parsed.report.skipped << "\n";
  for (const std::string& w : parsed.report.warnings) std::cout << "warning: " << w << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Actor-behavior enriched throughput time forecasting"};
  app.require_subcommand(1);
  Overrides o;
  std::string stage_name, log_path, log_format = "auto";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Artifact directory (overrides output.directory)");
    cmd->add_option("--seed", o.seed, "Global seed (overrides models.seed)");
    cmd->add_option("--feature-set", o.feature_set, "baseline, actor or both")
        ->check(CLI::IsMember({"baseline", "actor", "both"}));
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    cmd->add_flag("-q,--quiet", o.quiet, "Only report errors");
  };

  CLI::App* run = app.add_subcommand("run", "Run the full pipeline");
  add_common(run);
  CLI::App* stage = app.add_subcommand("stage", "Run a single stage on existing artifacts");
  stage->add_option("name", stage_name, "Stage name")->required()->check(CLI::IsMember(actorcast::stage_names()));
  add_common(stage);
  CLI::App* validate = app.add_subcommand("validate-config", "Check a configuration file");
  add_common(validate);
  CLI::App* summary = app.add_subcommand("summary", "Print basic statistics of an event log");
  summary->add_option("log", log_path, "Event log (.csv, .xes, .xes.gz)")->required()->check(CLI::ExistingFile);
  summary->add_option("--format", log_format, "auto, csv or xes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  const actorcast::LogFn log = [&](const std::string& m) {
    if (!o.quiet) std::cerr << m << "\n";
  };

  try {
    if (*summary) return print_summary(log_path, log_format);
    const actorcast::RunConfig config = load(o);
    if (*validate) {
      std::cout << "config ok\n";
      return kExitOk;
    }
    if (*stage) {
      actorcast::run_stage(stage_name, config, log);
      return kExitOk;
    }
    actorcast::run_pipeline(config, log);
    log("artifacts written to " + config.output_directory);
    return kExitOk;
  } catch (const actorcast::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const actorcast::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const actorcast::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
}
