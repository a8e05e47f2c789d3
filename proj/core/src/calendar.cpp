#include "sigradar/calendar.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace sigradar {

namespace {

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("invalid date '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ValidationError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const int y = parse_int(text.substr(0, 4), text);
  const int m = parse_int(text.substr(5, 2), text);
  const int d = parse_int(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ValidationError("invalid date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Quarter Quarter::of(Date d) {
  return Quarter{year_of(d), (month_of(d) - 1) / 3 + 1};
}

Quarter Quarter::from_index(std::int64_t index) {
  // floor division so negative years still map correctly
  std::int64_t y = index >= 0 ? index / 4 : -((-index + 3) / 4);
  return Quarter{static_cast<int>(y), static_cast<int>(index - y * 4) + 1};
}

Quarter Quarter::parse(std::string_view text) {
  const auto pos = text.find('Q');
  if (pos == std::string_view::npos || pos + 2 != text.size()) {
    throw ValidationError("invalid quarter '" + std::string(text) + "' (expected YYYYQn)");
  }
  const int y = parse_int(text.substr(0, pos), text);
  const int q = parse_int(text.substr(pos + 1), text);
  if (q < 1 || q > 4) throw ValidationError("invalid quarter '" + std::string(text) + "'");
  return Quarter{y, q};
}

Date Quarter::first_day() const {
  return Date{std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(3 * (q - 1) + 1)} /
              std::chrono::day{1}};
}

Date Quarter::last_day() const { return (*this + 1).first_day() - Days{1}; }

std::string Quarter::str() const { return std::to_string(year) + "Q" + std::to_string(q); }

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) {
      throw ValidationError("trading calendar dates must be strictly increasing (at " +
                            format_date(dates_[i]) + ")");
    }
  }
}

bool TradingCalendar::contains(Date d) const {
  return std::binary_search(dates_.begin(), dates_.end(), d);
}

std::vector<Quarter> TradingCalendar::quarters() const {
  std::vector<Quarter> out;
  for (Date d : dates_) {
    const Quarter q = Quarter::of(d);
    if (out.empty() || out.back() != q) out.push_back(q);
  }
  return out;
}

std::span<const Date> TradingCalendar::dates_between(Date first, Date last) const {
  auto lo = std::lower_bound(dates_.begin(), dates_.end(), first);
  auto hi = std::upper_bound(lo, dates_.end(), last);
  return {lo, hi};
}

std::span<const Date> TradingCalendar::dates_in(Quarter q) const {
  return dates_between(q.first_day(), q.last_day());
}

std::optional<Date> TradingCalendar::previous(Date d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.begin()) return std::nullopt;
  return *std::prev(it);
}

}  // namespace sigradar
