#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace tcurator {

using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

/// A UTC instant plus the UTC offset it was written with.
struct Timestamp {
  Instant utc{};
  int offset_minutes = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// `10/Oct/2000:13:55:36 -0700`
std::optional<Timestamp> parse_clf_timestamp(std::string_view text);
/// `2000-10-10T13:55:36Z`, `2000-10-10T13:55:36.250+02:00`
std::optional<Timestamp> parse_rfc3339(std::string_view text);
/// Renders with millisecond precision and the original offset; parse_rfc3339
/// reads it back exactly.
std::string format_rfc3339(const Timestamp& ts);
std::string format_rfc3339(Instant instant);

Instant now_ms();

}  // namespace tcurator
