#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "actorcast/event_log.hpp"

namespace actorcast {

/// Actor behavior of a consecutive same-case event pair. The enumerator order is
/// the reporting order.
enum class BehaviorType : std::uint8_t {
  kContinuation = 0,      // C
  kInterruption = 1,      // I
  kHandoverToIdle = 2,    // HI
  kHandoverToBusy = 3,    // HB
};

inline constexpr std::array<BehaviorType, 4> kBehaviorTypes = {
    BehaviorType::kContinuation, BehaviorType::kInterruption, BehaviorType::kHandoverToIdle,
    BehaviorType::kHandoverToBusy};

std::string_view behavior_code(BehaviorType b);  // "C", "I", "HI", "HB"
std::optional<BehaviorType> parse_behavior_code(std::string_view code);
inline size_t behavior_index(BehaviorType b) { return static_cast<size_t>(b); }

struct Transition {
  std::string case_id;
  Event from_event;
  Event to_event;
  BehaviorType behavior = BehaviorType::kContinuation;
  double duration_seconds = 0.0;
  Date date;  // calendar (UTC) date of from_event

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Per-resource timeline answering "did this resource touch another case in an interval?"
/// in O(log n).
class OccupancyIndex {
 public:
  explicit OccupancyIndex(const EventLog& log);

  /// True if `resource` has an event of a case other than `case_id` with timestamp in
  /// (from, to) or, when `include_from`, in [from, to).
  bool busy_with_other_case(const std::string& resource, const std::string& case_id, Timestamp from,
                            Timestamp to, bool include_from) const;

 private:
  struct Timeline {
    std::vector<Timestamp> times;
    std::vector<std::uint32_t> cases;
    // next_other[i]: first j > i with cases[j] != cases[i], or times.size()
    std::vector<std::uint32_t> next_other;
  };
  std::unordered_map<std::string, std::uint32_t> case_ids_;
  std::unordered_map<std::string, Timeline> timelines_;
};

/// Labels one pair. Swap in another rule to change the behavior definitions.
using BehaviorRule = std::function<BehaviorType(const Event& from, const Event& to, const OccupancyIndex&)>;

/// Same resource: C unless the resource worked another case strictly inside (t_from, t_to), else I.
/// Different resource: HB if the receiving resource worked another case in [t_from, t_to), else HI.
BehaviorType interval_occupancy_rule(const Event& from, const Event& to, const OccupancyIndex& occupancy);

/// All consecutive same-case pairs, ordered by from_event timestamp (ties: log order).
std::vector<Transition> classify_transitions(const EventLog& log,
                                             const BehaviorRule& rule = interval_occupancy_rule);

/// `case_id,from_activity,to_activity,from_ts,to_ts,resource_from,resource_to,behavior,duration_seconds,date`
void write_transitions_csv(std::ostream& out, std::span<const Transition> transitions);
std::vector<Transition> read_transitions_csv(std::istream& in);

}  // namespace actorcast
