#include "actorcast/timeseries.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "actorcast/csv.hpp"
#include "actorcast/errors.hpp"

namespace actorcast {

std::string count_column_name(BehaviorType b) { return "Count_" + std::string(behavior_code(b)); }
std::string time_column_name(BehaviorType b) { return "Time_" + std::string(behavior_code(b)) + "_seconds"; }

std::vector<std::pair<std::string, const std::vector<double>*>> SeriesPanel::actor_columns() const {
  std::vector<std::pair<std::string, const std::vector<double>*>> cols;
  for (BehaviorType b : kBehaviorTypes) cols.emplace_back(count_column_name(b), &count[behavior_index(b)]);
  for (BehaviorType b : kBehaviorTypes) cols.emplace_back(time_column_name(b), &time_seconds[behavior_index(b)]);
  return cols;
}

ThroughputSeries daily_throughput(const EventLog& log) {
  struct CaseSpan {
    Timestamp first;
    Timestamp last;
  };
  // events are time-ordered, so the first sighting is the start
  std::unordered_map<std::string, CaseSpan> spans;
  for (const Event& e : log.events()) {
    auto [it, inserted] = spans.try_emplace(e.case_id, CaseSpan{e.timestamp, e.timestamp});
    if (!inserted) it->second.last = e.timestamp;
  }
  // per date: (sum of hours, count); summed in a deterministic case order
  std::vector<std::pair<std::string, CaseSpan>> ordered(spans.begin(), spans.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first < b.second.first;
    return a.first < b.first;
  });
  std::map<Date, std::pair<double, long long>> per_day;
  for (const auto& [id, span] : ordered) {
    auto& [sum, n] = per_day[date_of(span.first)];
    sum += seconds_between(span.first, span.last) / 3600.0;
    ++n;
  }
  ThroughputSeries out;
  for (const auto& [d, acc] : per_day) {
    out.calendar.dates.push_back(d);
    out.tt.push_back(acc.first / static_cast<double>(acc.second));
    out.n_cases.push_back(acc.second);
  }
  return out;
}

BehaviorSeries daily_behavior_series(std::span<const Transition> transitions, const DailyCalendar& calendar) {
  BehaviorSeries out;
  for (auto& c : out.count) c.assign(calendar.size(), 0.0);
  for (auto& c : out.time_seconds) c.assign(calendar.size(), 0.0);
  for (const Transition& t : transitions) {
    const auto it = std::lower_bound(calendar.dates.begin(), calendar.dates.end(), t.date);
    if (it == calendar.dates.end() || *it != t.date) {
      ++out.dropped;
      continue;
    }
    const size_t day = static_cast<size_t>(it - calendar.dates.begin());
    const size_t b = behavior_index(t.behavior);
    out.count[b][day] += 1.0;
    out.time_seconds[b][day] += t.duration_seconds;
  }
  return out;
}

AssembledPanel assemble_panel(const EventLog& log, std::span<const Transition> transitions,
                              const PanelOptions& options) {
  ThroughputSeries tp = daily_throughput(log);
  if (tp.calendar.empty()) throw DataError("no complete cases");

  AssembledPanel result;
  PanelDiagnostics& diag = result.diagnostics;
  diag.total_transitions = transitions.size();
  const auto span_days = (tp.calendar.dates.back() - tp.calendar.dates.front()).count() + 1;
  diag.calendar_gap_days = static_cast<size_t>(span_days) - tp.calendar.size();

  if (options.dense_calendar) {
    ThroughputSeries dense;
    size_t src = 0;
    for (Date d = tp.calendar.dates.front(); d <= tp.calendar.dates.back(); d += std::chrono::days{1}) {
      dense.calendar.dates.push_back(d);
      if (tp.calendar.dates[src] == d) {
        dense.tt.push_back(tp.tt[src]);
        dense.n_cases.push_back(tp.n_cases[src]);
        ++src;
      } else {
        dense.tt.push_back(dense.tt.back());
        dense.n_cases.push_back(0);
        ++diag.filled_days;
      }
    }
    tp = std::move(dense);
  }

  BehaviorSeries behavior = daily_behavior_series(transitions, tp.calendar);
  diag.dropped_transitions = behavior.dropped;

  SeriesPanel& panel = result.panel;
  panel.calendar = std::move(tp.calendar);
  panel.tt = std::move(tp.tt);
  panel.n_cases = std::move(tp.n_cases);
  panel.count = std::move(behavior.count);
  panel.time_seconds = std::move(behavior.time_seconds);
  return result;
}

void write_panel_csv(std::ostream& out, const SeriesPanel& panel) {
  std::vector<std::string> header = {"date", "TT", "n_cases"};
  const auto cols = panel.actor_columns();
  for (const auto& [name, col] : cols) header.push_back(name);
  csv::write_row(out, header);
  for (size_t i = 0; i < panel.size(); ++i) {
    std::vector<std::string> row = {format_date(panel.calendar.dates[i]), csv::format_double(panel.tt[i]),
                                    std::to_string(panel.n_cases[i])};
    for (const auto& [name, col] : cols) row.push_back(csv::format_double((*col)[i]));
    csv::write_row(out, row);
  }
}

SeriesPanel read_panel_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  SeriesPanel panel;
  const size_t c_date = table.column("date"), c_tt = table.column("TT"), c_n = table.column("n_cases");
  std::array<size_t, 4> c_count{}, c_time{};
  for (BehaviorType b : kBehaviorTypes) {
    c_count[behavior_index(b)] = table.column(count_column_name(b));
    c_time[behavior_index(b)] = table.column(time_column_name(b));
  }
  for (const auto& row : table.rows) {
    const auto d = parse_date(row[c_date]);
    if (!d) throw DataError("panel csv: bad date '" + row[c_date] + "'");
    if (!panel.calendar.dates.empty() && *d <= panel.calendar.dates.back()) {
      throw DataError("panel csv: dates must be strictly increasing");
    }
    panel.calendar.dates.push_back(*d);
    panel.tt.push_back(csv::parse_double(row[c_tt]));
    panel.n_cases.push_back(csv::parse_int(row[c_n]));
    for (size_t b = 0; b < 4; ++b) {
      panel.count[b].push_back(csv::parse_double(row[c_count[b]]));
      panel.time_seconds[b].push_back(csv::parse_double(row[c_time[b]]));
    }
  }
  return panel;
}

}  // namespace actorcast
