#pragma once

// Reference implementations used as test oracles. They favour obviousness over
// speed and share no code with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "actorcast/behavior.hpp"
#include "actorcast/event_log.hpp"
#include "actorcast/timeseries.hpp"

namespace oracle {

using actorcast::BehaviorType;
using actorcast::Event;
using actorcast::EventLog;

/// Scans every event of the relevant resource for each consecutive same-case pair.
inline std::vector<BehaviorType> classify(const std::vector<Event>& events) {
  std::vector<BehaviorType> out;
  std::map<std::string, std::vector<size_t>> by_case;
  for (size_t i = 0; i < events.size(); ++i) by_case[events[i].case_id].push_back(i);
  // Pairs keyed by the global index of the from-event.
  std::map<size_t, BehaviorType> labelled;
  for (const auto& [case_id, idx] : by_case) {
    for (size_t k = 0; k + 1 < idx.size(); ++k) {
      const Event& a = events[idx[k]];
      const Event& b = events[idx[k + 1]];
      const bool same = a.resource == b.resource;
      bool busy = false;
      for (const Event& e : events) {
        if (e.case_id == case_id || e.resource != b.resource) continue;
        if (same) {
          busy = busy || (e.timestamp > a.timestamp && e.timestamp < b.timestamp);
        } else {
          busy = busy || (e.timestamp >= a.timestamp && e.timestamp < b.timestamp);
        }
      }
      BehaviorType label;
      if (same) {
        label = busy ? BehaviorType::kInterruption : BehaviorType::kContinuation;
      } else {
        label = busy ? BehaviorType::kHandoverToBusy : BehaviorType::kHandoverToIdle;
      }
      labelled[idx[k]] = label;
    }
  }
  for (const auto& [i, label] : labelled) out.push_back(label);
  return out;
}

/// Random log: up to `max_events` events over `n_resources` resources, timestamps on a
/// coarse grid so that ties and zero-length transitions occur.
inline EventLog random_log(std::mt19937_64& gen, size_t max_events, int n_resources, int n_days = 3) {
  std::uniform_int_distribution<size_t> n_ev(2, max_events);
  std::uniform_int_distribution<int> res(0, n_resources - 1);
  std::uniform_int_distribution<int> slot(0, n_days * 24 * 4 - 1);
  const size_t n = n_ev(gen);
  std::uniform_int_distribution<size_t> case_pick(0, std::max<size_t>(1, n / 3));
  std::vector<Event> events;
  const auto origin = std::chrono::sys_days{std::chrono::year{2024} / 3 / 4};
  for (size_t i = 0; i < n; ++i) {
    Event e;
    e.case_id = "c" + std::to_string(case_pick(gen));
    e.activity = "a" + std::to_string(i % 4);
    e.resource = "r" + std::to_string(res(gen));
    e.timestamp = actorcast::Timestamp(origin) + std::chrono::minutes(15 * slot(gen));
    events.push_back(std::move(e));
  }
  return EventLog(std::move(events), "random");
}

/// Direct per-day aggregation.
struct DayAggregate {
  double tt_hours = 0.0;
  long long cases = 0;
  double count[4] = {0, 0, 0, 0};
  double seconds[4] = {0, 0, 0, 0};
};

inline std::map<actorcast::Date, DayAggregate> aggregate(const EventLog& log,
                                                         const std::vector<actorcast::Transition>& transitions) {
  std::map<std::string, std::pair<actorcast::Timestamp, actorcast::Timestamp>> span;
  for (const Event& e : log.events()) {
    auto it = span.find(e.case_id);
    if (it == span.end()) {
      span[e.case_id] = {e.timestamp, e.timestamp};
    } else {
      it->second.first = std::min(it->second.first, e.timestamp);
      it->second.second = std::max(it->second.second, e.timestamp);
    }
  }
  std::map<actorcast::Date, DayAggregate> days;
  std::map<actorcast::Date, double> total;
  for (const auto& [id, s] : span) {
    const auto d = std::chrono::floor<std::chrono::days>(s.first);
    days[d].cases += 1;
    total[d] += std::chrono::duration<double>(s.second - s.first).count() / 3600.0;
  }
  for (auto& [d, agg] : days) agg.tt_hours = total[d] / static_cast<double>(agg.cases);
  for (const auto& t : transitions) {
    const auto d = std::chrono::floor<std::chrono::days>(t.from_event.timestamp);
    auto it = days.find(d);
    if (it == days.end()) continue;
    const size_t b = static_cast<size_t>(t.behavior);
    it->second.count[b] += 1;
    it->second.seconds[b] += std::chrono::duration<double>(t.to_event.timestamp - t.from_event.timestamp).count();
  }
  return days;
}

/// Best single split by enumerating every (feature, threshold) and summing squared
/// deviations directly.
struct Split {
  int feature = -1;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
  double left_mean = 0.0;
  double right_mean = 0.0;
};

inline double sse_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

inline double mean_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

inline double split_sse(const std::vector<std::vector<double>>& x, const std::vector<double>& y, int f, double thr,
                        size_t min_leaf, std::vector<double>* left_out = nullptr,
                        std::vector<double>* right_out = nullptr) {
  std::vector<double> left, right;
  for (size_t i = 0; i < y.size(); ++i) (x[i][static_cast<size_t>(f)] <= thr ? left : right).push_back(y[i]);
  if (left.size() < min_leaf || right.size() < min_leaf) return std::numeric_limits<double>::infinity();
  if (left_out) *left_out = left;
  if (right_out) *right_out = right;
  return sse_of(left) + sse_of(right);
}

inline std::optional<Split> best_split(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                       size_t min_leaf) {
  const double parent = sse_of(y);
  Split best;
  const size_t p = x.empty() ? 0 : x[0].size();
  for (size_t f = 0; f < p; ++f) {
    std::vector<double> values;
    for (const auto& row : x) values.push_back(row[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (size_t k = 0; k + 1 < values.size(); ++k) {
      const double thr = values[k] + (values[k + 1] - values[k]) / 2.0;
      std::vector<double> l, r;
      const double s = split_sse(x, y, static_cast<int>(f), thr, min_leaf, &l, &r);
      if (s < best.sse) {
        best = {static_cast<int>(f), thr, s, mean_of(l), mean_of(r)};
      }
    }
  }
  if (best.feature < 0 || !(best.sse < parent)) return std::nullopt;
  return best;
}

/// Peaks by definition: strict local maxima, prominence from explicit side minima,
/// then repeated selection of the most prominent remaining peak.
inline double prominence(const std::vector<double>& x, size_t i) {
  double left_min = x[i];
  for (size_t j = i; j-- > 0;) {
    if (x[j] > x[i]) break;
    left_min = std::min(left_min, x[j]);
  }
  double right_min = x[i];
  for (size_t j = i + 1; j < x.size(); ++j) {
    if (x[j] > x[i]) break;
    right_min = std::min(right_min, x[j]);
  }
  return x[i] - std::max(left_min, right_min);
}

inline std::vector<size_t> peaks(const std::vector<double>& x, size_t min_distance, std::optional<double> threshold) {
  std::vector<size_t> cand;
  for (size_t i = 1; i + 1 < x.size(); ++i) {
    if (x[i - 1] < x[i] && x[i] > x[i + 1]) {
      if (!threshold || prominence(x, i) >= *threshold) cand.push_back(i);
    }
  }
  std::vector<size_t> kept;
  std::vector<bool> alive(cand.size(), true);
  while (true) {
    int pick = -1;
    for (size_t k = 0; k < cand.size(); ++k) {
      if (!alive[k]) continue;
      if (pick < 0 || prominence(x, cand[k]) > prominence(x, cand[static_cast<size_t>(pick)])) {
        pick = static_cast<int>(k);
      }
    }
    if (pick < 0) break;
    const size_t p = cand[static_cast<size_t>(pick)];
    kept.push_back(p);
    for (size_t k = 0; k < cand.size(); ++k) {
      const size_t d = cand[k] > p ? cand[k] - p : p - cand[k];
      if (d < min_distance) alive[k] = false;
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

/// Metrics by compensated summation in long double.
struct Metrics {
  double rmse, mae;
  std::optional<double> r2;
};

inline Metrics metrics(const std::vector<double>& a, const std::vector<double>& p) {
  long double se = 0, ae = 0, sum = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const long double e = static_cast<long double>(a[i]) - p[i];
    se += e * e;
    ae += e < 0 ? -e : e;
    sum += a[i];
  }
  const long double n = static_cast<long double>(a.size());
  const long double mean = sum / n;
  long double st = 0;
  for (double v : a) st += (v - mean) * (v - mean);
  Metrics m{static_cast<double>(std::sqrt(se / n)), static_cast<double>(ae / n), std::nullopt};
  if (st > 0) m.r2 = static_cast<double>(1.0L - se / st);
  return m;
}

}  // namespace oracle
