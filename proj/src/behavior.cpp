#include "actorcast/behavior.hpp"

#include <algorithm>
#include <numeric>

#include "actorcast/csv.hpp"
#include "actorcast/errors.hpp"

namespace actorcast {

std::string_view behavior_code(BehaviorType b) {
  switch (b) {
    case BehaviorType::kContinuation: return "C";
    case BehaviorType::kInterruption: return "I";
    case BehaviorType::kHandoverToIdle: return "HI";
    case BehaviorType::kHandoverToBusy: return "HB";
  }
  return "?";
}

std::optional<BehaviorType> parse_behavior_code(std::string_view code) {
  for (BehaviorType b : kBehaviorTypes) {
    if (behavior_code(b) == code) return b;
  }
  return std::nullopt;
}

OccupancyIndex::OccupancyIndex(const EventLog& log) {
  for (const Event& e : log.events()) {
    const auto [it, inserted] = case_ids_.try_emplace(e.case_id, static_cast<std::uint32_t>(case_ids_.size()));
    Timeline& tl = timelines_[e.resource];
    tl.times.push_back(e.timestamp);
    tl.cases.push_back(it->second);
  }
  for (auto& [resource, tl] : timelines_) {
    const size_t n = tl.times.size();
    tl.next_other.assign(n, static_cast<std::uint32_t>(n));
    for (size_t i = n; i-- > 1;) {
      // the first index after i-1 with a different case is i itself, or inherits i's answer
      tl.next_other[i - 1] = tl.cases[i] != tl.cases[i - 1] ? static_cast<std::uint32_t>(i) : tl.next_other[i];
    }
  }
}

bool OccupancyIndex::busy_with_other_case(const std::string& resource, const std::string& case_id,
                                          Timestamp from, Timestamp to, bool include_from) const {
  const auto tl_it = timelines_.find(resource);
  if (tl_it == timelines_.end()) return false;
  const Timeline& tl = tl_it->second;
  const auto begin = include_from ? std::lower_bound(tl.times.begin(), tl.times.end(), from)
                                  : std::upper_bound(tl.times.begin(), tl.times.end(), from);
  const auto end = std::lower_bound(tl.times.begin(), tl.times.end(), to);
  if (begin >= end) return false;
  const size_t first = static_cast<size_t>(begin - tl.times.begin());
  const size_t last = static_cast<size_t>(end - tl.times.begin());
  const auto case_it = case_ids_.find(case_id);
  const std::uint32_t own = case_it == case_ids_.end() ? UINT32_MAX : case_it->second;
  if (tl.cases[first] != own) return true;
  return tl.next_other[first] < last;
}

BehaviorType interval_occupancy_rule(const Event& from, const Event& to, const OccupancyIndex& occupancy) {
  if (from.resource == to.resource) {
    return occupancy.busy_with_other_case(from.resource, from.case_id, from.timestamp, to.timestamp, false)
               ? BehaviorType::kInterruption
               : BehaviorType::kContinuation;
  }
  return occupancy.busy_with_other_case(to.resource, from.case_id, from.timestamp, to.timestamp, true)
             ? BehaviorType::kHandoverToBusy
             : BehaviorType::kHandoverToIdle;
}

std::vector<Transition> classify_transitions(const EventLog& log, const BehaviorRule& rule) {
  const OccupancyIndex occupancy(log);
  const auto& events = log.events();

  // previous event index of the same case, in global order
  std::unordered_map<std::string, size_t> last_of_case;
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < events.size(); ++i) {
    const auto [it, inserted] = last_of_case.try_emplace(events[i].case_id, i);
    if (!inserted) {
      pairs.emplace_back(it->second, i);
      it->second = i;
    }
  }
  // pairs are ordered by their second element; reorder by first (from_event)
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Transition> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    Transition t;
    t.case_id = events[i].case_id;
    t.from_event = events[i];
    t.to_event = events[j];
    t.behavior = rule(events[i], events[j], occupancy);
    t.duration_seconds = seconds_between(events[i].timestamp, events[j].timestamp);
    t.date = date_of(events[i].timestamp);
    out.push_back(std::move(t));
  }
  return out;
}

void write_transitions_csv(std::ostream& out, std::span<const Transition> transitions) {
  out << "case_id,from_activity,to_activity,from_ts,to_ts,resource_from,resource_to,behavior,duration_seconds,date\n";
  for (const Transition& t : transitions) {
    const std::string row[] = {t.case_id,
                               t.from_event.activity,
                               t.to_event.activity,
                               format_timestamp(t.from_event.timestamp),
                               format_timestamp(t.to_event.timestamp),
                               t.from_event.resource,
                               t.to_event.resource,
                               std::string(behavior_code(t.behavior)),
                               csv::format_double(t.duration_seconds),
                               format_date(t.date)};
    csv::write_row(out, row);
  }
}

std::vector<Transition> read_transitions_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  const size_t c_case = table.column("case_id"), c_fa = table.column("from_activity"),
               c_ta = table.column("to_activity"), c_fts = table.column("from_ts"), c_tts = table.column("to_ts"),
               c_rf = table.column("resource_from"), c_rt = table.column("resource_to"),
               c_b = table.column("behavior"), c_d = table.column("duration_seconds"), c_date = table.column("date");
  std::vector<Transition> out;
  out.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto fail = [&](const std::string& what) {
      return DataError("transitions csv row " + std::to_string(r + 1) + ": " + what);
    };
    const auto fts = parse_iso8601(row[c_fts]);
    const auto tts = parse_iso8601(row[c_tts]);
    const auto b = parse_behavior_code(row[c_b]);
    const auto d = parse_date(row[c_date]);
    if (!fts || !tts) throw fail("bad timestamp");
    if (!b) throw fail("bad behavior '" + row[c_b] + "'");
    if (!d) throw fail("bad date");
    Transition t;
    t.case_id = row[c_case];
    t.from_event = {row[c_case], row[c_fa], *fts, row[c_rf]};
    t.to_event = {row[c_case], row[c_ta], *tts, row[c_rt]};
    t.behavior = *b;
    t.duration_seconds = csv::parse_double(row[c_d]);
    t.date = *d;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace actorcast
