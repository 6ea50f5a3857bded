#include "actorcast/event_log.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "actorcast/csv.hpp"
#include "actorcast/errors.hpp"
#include "xes_parser.hpp"

namespace actorcast {

namespace {

std::string trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

constexpr size_t kMaxStoredErrors = 50;

}  // namespace

EventLog::EventLog(std::vector<Event> events, std::string source_name)
    : events_(std::move(events)), source_name_(std::move(source_name)) {
  std::stable_sort(events_.begin(), events_.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

std::optional<std::pair<Timestamp, Timestamp>> EventLog::span() const {
  if (events_.empty()) return std::nullopt;
  return std::pair{events_.front().timestamp, events_.back().timestamp};
}

void record_row_error(IngestReport& report, size_t line, std::string message) {
  ++report.skipped;
  if (report.errors.size() < kMaxStoredErrors) report.errors.push_back({line, std::move(message)});
}

void enforce_error_budget(const IngestReport& report, const ParseOptions& options) {
  if (report.skipped == 0) return;
  const double allowed = options.max_error_fraction * static_cast<double>(report.records_read);
  if (static_cast<double>(report.skipped) > allowed) {
    std::string msg = std::to_string(report.skipped) + " of " + std::to_string(report.records_read) +
                      " records could not be parsed (budget " +
                      std::to_string(options.max_error_fraction * 100.0) + "%)";
    if (!report.errors.empty()) {
      msg += "; first error at line " + std::to_string(report.errors.front().line) + ": " +
             report.errors.front().message;
    }
    throw DataError(msg);
  }
}

std::optional<Timestamp> parse_timestamp_field(std::string_view text, const ParseOptions& options) {
  if (options.timestamp_format.empty() || options.timestamp_format == "auto") {
    return parse_iso8601(text, options.naive_utc_offset_minutes);
  }
  return parse_with_format(text, options.timestamp_format, options.naive_utc_offset_minutes);
}

ParsedLog parse_csv(std::istream& in, const ParseOptions& options) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError("csv: missing header row");
  for (auto& h : header) h = trimmed(h);

  auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("csv: mapped column '" + name + "' not found in header");
    return static_cast<size_t>(it - header.begin());
  };
  const size_t case_col = find_column(options.mapping.case_column);
  const size_t activity_col = find_column(options.mapping.activity_column);
  const size_t ts_col = find_column(options.mapping.timestamp_column);
  const size_t resource_col = find_column(options.mapping.resource_column);

  ParsedLog result;
  IngestReport& report = result.report;
  std::vector<Event> events;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && trimmed(fields[0]).empty()) continue;
    ++report.records_read;
    if (fields.size() != header.size()) {
      record_row_error(report, reader.line(),
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
      continue;
    }
    Event e;
    e.case_id = trimmed(fields[case_col]);
    e.activity = trimmed(fields[activity_col]);
    e.resource = trimmed(fields[resource_col]);
    if (e.case_id.empty() || e.activity.empty() || e.resource.empty()) {
      record_row_error(report, reader.line(), "empty case, activity or resource");
      continue;
    }
    const auto ts = parse_timestamp_field(fields[ts_col], options);
    if (!ts) {
      record_row_error(report, reader.line(), "unparseable timestamp '" + fields[ts_col] + "'");
      continue;
    }
    e.timestamp = *ts;
    events.push_back(std::move(e));
  }
  enforce_error_budget(report, options);
  result.log = EventLog(std::move(events), options.source_name);
  return result;
}

ParsedLog parse_xes(std::istream& in, const ParseOptions& options) {
  XesParser parser(options);
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<size_t>(in.gcount());
    parser.feed(buffer.data(), got, false);
  }
  parser.feed(nullptr, 0, true);
  return parser.finish();
}

ParsedLog read_log_file(const std::string& path, const std::string& requested_format, const ParseOptions& options) {
  ParseOptions opts = options;
  if (opts.source_name.empty()) opts.source_name = path;
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  const bool gz = ends_with(".gz");
  std::string format = requested_format;
  if (format == "auto") {
    if (ends_with(".xes") || ends_with(".xes.gz")) {
      format = "xes";
    } else if (ends_with(".csv")) {
      format = "csv";
    } else {
      throw DataError("cannot infer log format of '" + path + "'; set dataset.format");
    }
  }
  if (format == "xes" && gz) return parse_xes_gz_file(path, opts);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open log '" + path + "'");
  if (format == "csv") return parse_csv(in, opts);
  if (format == "xes") return parse_xes(in, opts);
  throw DataError("unknown log format '" + format + "'");
}

std::map<std::string, CaseTrace> build_traces(const EventLog& log) {
  std::map<std::string, CaseTrace> traces;
  for (const Event& e : log.events()) {
    auto [it, inserted] = traces.try_emplace(e.case_id);
    if (inserted) it->second.case_id = e.case_id;
    it->second.events.push_back(e);
  }
  return traces;
}

LogSummary log_summary(const EventLog& log) {
  std::unordered_set<std::string> cases, resources, activities;
  for (const Event& e : log.events()) {
    cases.insert(e.case_id);
    resources.insert(trimmed(e.resource));
    activities.insert(e.activity);
  }
  return {log.size(), cases.size(), resources.size(), activities.size(), log.span()};
}

void write_canonical_csv(std::ostream& out, const EventLog& log) {
  out << "case_id,activity,timestamp,resource\n";
  for (const Event& e : log.events()) {
    const std::string row[] = {e.case_id, e.activity, format_timestamp(e.timestamp), e.resource};
    csv::write_row(out, row);
  }
}

EventLog trim_boundary_cases(const EventLog& log, int days, size_t* dropped_cases) {
  if (dropped_cases) *dropped_cases = 0;
  if (days <= 0 || log.empty()) return log;
  const Timestamp cutoff = log.span()->second - std::chrono::days{days};
  std::unordered_map<std::string, Timestamp> last;
  for (const Event& e : log.events()) last[e.case_id] = e.timestamp;
  std::vector<Event> kept;
  kept.reserve(log.size());
  size_t dropped = 0;
  for (const auto& [id, ts] : last) dropped += ts > cutoff ? 1 : 0;
  for (const Event& e : log.events()) {
    if (last[e.case_id] <= cutoff) kept.push_back(e);
  }
  if (dropped_cases) *dropped_cases = dropped;
  return EventLog(std::move(kept), log.source_name());
}

}  // namespace actorcast
