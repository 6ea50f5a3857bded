#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "actorcast/time.hpp"

namespace actorcast {

inline constexpr const char* kUnknownResource = "UNKNOWN";

/// One executed activity: (case, activity, timestamp, resource).
struct Event {
  std::string case_id;
  std::string activity;
  Timestamp timestamp;
  std::string resource;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Immutable, globally time-ordered event collection. Construction sorts by
/// timestamp with a stable sort, so equal timestamps keep their input order.
class EventLog {
 public:
  EventLog() = default;
  EventLog(std::vector<Event> events, std::string source_name);

  const std::vector<Event>& events() const { return events_; }
  const std::string& source_name() const { return source_name_; }
  size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  /// (first, last) timestamp, or nullopt for an empty log.
  std::optional<std::pair<Timestamp, Timestamp>> span() const;

 private:
  std::vector<Event> events_;
  std::string source_name_;
};

struct CaseTrace {
  std::string case_id;
  std::vector<Event> events;
};

struct ColumnMapping {
  std::string case_column = "case_id";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
  std::string resource_column = "resource";
};

struct ParseOptions {
  ColumnMapping mapping;
  /// "auto" = ISO-8601; anything else is a std::get_time format string.
  std::string timestamp_format = "auto";
  /// Offset from UTC assumed for timestamps that carry none.
  int naive_utc_offset_minutes = 0;
  /// Fraction of bad rows tolerated before the parse fails.
  double max_error_fraction = 0.01;
  std::string source_name;
};

struct RowError {
  size_t line = 0;
  std::string message;
};

struct IngestReport {
  size_t records_read = 0;
  size_t skipped = 0;
  /// First errors only; `skipped` holds the full count.
  std::vector<RowError> errors;
  size_t unknown_resources = 0;
  size_t synthesized_case_ids = 0;
  std::vector<std::string> warnings;
};

struct ParsedLog {
  EventLog log;
  IngestReport report;
};

/// Parses a headered CSV. Throws DataError when a mapped column is missing or the
/// bad-row budget is exceeded.
ParsedLog parse_csv(std::istream& in, const ParseOptions& options = {});

/// Parses an XES document (trace/event elements with standard extension keys).
/// Throws DataError on malformed XML.
ParsedLog parse_xes(std::istream& in, const ParseOptions& options = {});

/// `format` is csv, xes or auto (by extension: .csv, .xes, .xes.gz).
ParsedLog read_log_file(const std::string& path, const std::string& format, const ParseOptions& options);

/// Per-case traces in global order. Case ids are the map keys.
std::map<std::string, CaseTrace> build_traces(const EventLog& log);

struct LogSummary {
  size_t n_events = 0;
  size_t n_cases = 0;
  size_t n_resources = 0;
  size_t n_activities = 0;
  std::optional<std::pair<Timestamp, Timestamp>> span;
};

LogSummary log_summary(const EventLog& log);

/// `case_id,activity,timestamp,resource` with canonical UTC timestamps.
void write_canonical_csv(std::ostream& out, const EventLog& log);

/// Drops every case whose last event lies within the final `days` days of the log span.
/// Returns the retained log; `dropped_cases` receives the number of removed cases.
EventLog trim_boundary_cases(const EventLog& log, int days, size_t* dropped_cases = nullptr);

}  // namespace actorcast
