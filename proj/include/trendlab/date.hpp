#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trendlab {

/// Civil calendar date. Arithmetic goes through day counts relative to
/// 1970-01-01 (proleptic Gregorian).
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  std::int64_t days_since_epoch() const;
  static Date from_days(std::int64_t days);

  /// 0 = Monday ... 6 = Sunday.
  int weekday() const;

  /// Monotone key that changes exactly when an ISO week (Monday-based) ends.
  std::int64_t iso_week_key() const;

  std::string iso() const;
  static std::optional<Date> parse_iso(std::string_view text);
};

/// `count` consecutive Monday-to-Friday dates starting at `start` (rolled
/// forward to a weekday if needed).
std::vector<Date> weekday_calendar(Date start, std::size_t count);

}  // namespace trendlab
