#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace actorcast {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;
using Date = std::chrono::sys_days;

/// Parses `YYYY-MM-DD[T| ]HH:MM:SS[.f+][Z|+hh:mm|-hh:mm|+hhmm]` or a bare date.
/// Timestamps without an offset are taken to be at `naive_offset_minutes` from UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text, int naive_offset_minutes = 0);

/// strptime-style parse (via std::get_time); the result is shifted by the naive offset.
std::optional<Timestamp> parse_with_format(std::string_view text, const std::string& format,
                                           int naive_offset_minutes = 0);

/// Canonical UTC rendering: `YYYY-MM-DDTHH:MM:SS[.ffffff]Z`, fraction only when non-zero
/// and with trailing zeros stripped. Round-trips through parse_iso8601.
std::string format_timestamp(Timestamp ts);

Date date_of(Timestamp ts);
std::string format_date(Date d);
std::optional<Date> parse_date(std::string_view text);

inline double seconds_between(Timestamp from, Timestamp to) {
  return std::chrono::duration<double>(to - from).count();
}

}  // namespace actorcast
