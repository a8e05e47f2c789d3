#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigradar/error.hpp"

namespace sigradar {

using Date = std::chrono::sys_days;
using Days = std::chrono::days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws ValidationError.
Date parse_date(std::string_view text);
std::string format_date(Date d);

// Calendar quarter label; ordering is chronological.
struct Quarter {
  int year = 0;
  int q = 1;  // 1..4

  static Quarter of(Date d);
  static Quarter from_index(std::int64_t index);
  static Quarter parse(std::string_view text);  // "2012Q3"

  std::int64_t index() const { return static_cast<std::int64_t>(year) * 4 + (q - 1); }
  Quarter operator+(int n) const { return from_index(index() + n); }
  Quarter operator-(int n) const { return from_index(index() - n); }
  Date first_day() const;
  Date last_day() const;
  std::string str() const;

  friend auto operator<=>(const Quarter&, const Quarter&) = default;
};

inline int month_of(Date d) {
  return static_cast<int>(static_cast<unsigned>(std::chrono::year_month_day{d}.month()));
}
inline int year_of(Date d) {
  return static_cast<int>(std::chrono::year_month_day{d}.year());
}

/// Strictly increasing set of trading dates, each tagged with its calendar quarter.
class TradingCalendar {
 public:
  TradingCalendar() = default;
  explicit TradingCalendar(std::vector<Date> dates);

  std::span<const Date> dates() const { return dates_; }
  std::size_t size() const { return dates_.size(); }
  bool empty() const { return dates_.empty(); }
  bool contains(Date d) const;

  Quarter quarter_of(Date d) const { return Quarter::of(d); }
  std::vector<Quarter> quarters() const;
  std::span<const Date> dates_in(Quarter q) const;
  std::span<const Date> dates_between(Date first, Date last) const;
  // Trading date immediately preceding d, if any.
  std::optional<Date> previous(Date d) const;

 private:
  std::vector<Date> dates_;
};

}  // namespace sigradar
