#include "trendlab/date.hpp"

#include <charconv>
#include <cstdio>

namespace trendlab {

// Howard Hinnant's civil-from-days / days-from-civil algorithms.
std::int64_t Date::days_since_epoch() const {
  const std::int64_t y = year - (month <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t mp = (month + 9) % 12;
  const std::int64_t doy = (153 * mp + 2) / 5 + day - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

Date Date::from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const int d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  const int m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  const int y = static_cast<int>(yoe + era * 400 + (m <= 2 ? 1 : 0));
  return Date{y, m, d};
}

int Date::weekday() const {
  // 1970-01-01 was a Thursday.
  const std::int64_t d = days_since_epoch();
  return static_cast<int>(((d + 3) % 7 + 7) % 7);
}

std::int64_t Date::iso_week_key() const {
  const std::int64_t d = days_since_epoch() + 3;
  return d >= 0 ? d / 7 : (d - 6) / 7;
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Date> Date::parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
  };
  const auto y = field(0, 4), m = field(5, 2), d = field(8, 2);
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
  const Date date{*y, *m, *d};
  // Reject 2021-02-30 and friends.
  if (from_days(date.days_since_epoch()) != date) return std::nullopt;
  return date;
}

std::vector<Date> weekday_calendar(Date start, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  std::int64_t d = start.days_since_epoch();
  while (out.size() < count) {
    const Date date = Date::from_days(d);
    if (date.weekday() < 5) out.push_back(date);
    ++d;
  }
  return out;
}

}  // namespace trendlab
