#pragma once

#include <string>
#include <string_view>

#include "grwalk/types.hpp"

namespace grwalk {

// Timestamps are naive exchange-local times; no zone conversion is done.

/// Parses "YYYY-MM-DDTHH:MM:SS[.fffffffff][Z]" (a space may replace 'T').
[[nodiscard]] Timestamp parse_timestamp(std::string_view text);

/// Formats with fractional seconds only when they are non-zero.
[[nodiscard]] std::string format_timestamp(Timestamp t);

[[nodiscard]] TradingDay parse_date(std::string_view text);
[[nodiscard]] std::string format_date(TradingDay d);

/// Durations like "15m", "1h", "4h", "90s", "250ms", "0". A bare number is minutes.
[[nodiscard]] Nanoseconds parse_duration(std::string_view text);
[[nodiscard]] std::string format_duration(Nanoseconds d);

/// "HH:MM" or "HH:MM:SS" as an offset from midnight.
[[nodiscard]] Nanoseconds parse_time_of_day(std::string_view text);
/// "HH:MM:SS"; sub-second parts are truncated.
[[nodiscard]] std::string format_time_of_day(Nanoseconds offset);

}  // namespace grwalk
