#pragma once

#include <array>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "actorcast/behavior.hpp"
#include "actorcast/event_log.hpp"

namespace actorcast {

/// Days on which at least one case started, strictly increasing. Positions in this
/// sequence are the time steps; physical gaps between dates are not time steps.
struct DailyCalendar {
  std::vector<Date> dates;

  size_t size() const { return dates.size(); }
  bool empty() const { return dates.empty(); }
};

using BehaviorColumns = std::array<std::vector<double>, kBehaviorTypes.size()>;

/// Calendar-indexed multivariate daily series.
struct SeriesPanel {
  DailyCalendar calendar;
  std::vector<double> tt;            // mean case throughput time of cases started that day, hours
  std::vector<long long> n_cases;    // cases started that day
  BehaviorColumns count;             // transitions per behavior, indexed by behavior_index()
  BehaviorColumns time_seconds;      // summed transition durations per behavior

  size_t size() const { return calendar.size(); }

  /// The eight actor columns in template order: Count_C..Count_HB, Time_C_seconds..Time_HB_seconds.
  std::vector<std::pair<std::string, const std::vector<double>*>> actor_columns() const;
};

std::string count_column_name(BehaviorType b);  // Count_HB
std::string time_column_name(BehaviorType b);   // Time_HB_seconds

struct ThroughputSeries {
  DailyCalendar calendar;
  std::vector<double> tt;
  std::vector<long long> n_cases;
};

/// Mean (last - first) event time, in hours, over cases grouped by start date.
ThroughputSeries daily_throughput(const EventLog& log);

struct BehaviorSeries {
  BehaviorColumns count;
  BehaviorColumns time_seconds;
  /// Transitions dated on a day that is not in the calendar.
  size_t dropped = 0;
};

BehaviorSeries daily_behavior_series(std::span<const Transition> transitions, const DailyCalendar& calendar);

struct PanelOptions {
  /// Every physical day between the first and last case start becomes a step: counts
  /// zero-filled, TT carried forward, n_cases 0.
  bool dense_calendar = false;
};

struct PanelDiagnostics {
  size_t total_transitions = 0;
  size_t dropped_transitions = 0;
  /// Physical days inside the calendar span that are not calendar steps.
  size_t calendar_gap_days = 0;
  size_t filled_days = 0;  // dense mode only
};

struct AssembledPanel {
  SeriesPanel panel;
  PanelDiagnostics diagnostics;
};

/// Throws DataError("no complete cases") when the calendar is empty.
AssembledPanel assemble_panel(const EventLog& log, std::span<const Transition> transitions,
                              const PanelOptions& options = {});

/// `date,TT,n_cases,Count_C,Count_I,Count_HI,Count_HB,Time_C_seconds,Time_I_seconds,Time_HI_seconds,Time_HB_seconds`
void write_panel_csv(std::ostream& out, const SeriesPanel& panel);
SeriesPanel read_panel_csv(std::istream& in);

}  // namespace actorcast
