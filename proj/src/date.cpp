#include "adopt/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "adopt/error.hpp"

namespace adopt {

using namespace std::chrono;

Date make_date(int year, unsigned month, unsigned day) {
  return sys_days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
}

namespace {

bool parse_digits(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
      !parse_digits(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                           std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

Date parse_date_or_throw(std::string_view text, const std::string& module) {
  auto date = parse_date(text);
  if (!date) throw Error(ErrorKind::Format, module, fmt::format("invalid date '{}'", text));
  return *date;
}

std::string format_date(Date date) {
  const year_month_day ymd{date};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::string format_month(Date date) {
  const year_month_day ymd{date};
  return fmt::format("{:04d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()));
}

Date month_start(Date date) {
  const year_month_day ymd{date};
  return sys_days{ymd.year() / ymd.month() / std::chrono::day{1}};
}

Date next_month_start(Date date) {
  const year_month_day ymd{date};
  const year_month next = ymd.year() / ymd.month() + months{1};
  return sys_days{next / std::chrono::day{1}};
}

Date add_days(Date date, int n) { return date + days{n}; }

int days_between(Date from, Date to) { return static_cast<int>((to - from).count()); }

Date utc_today() { return floor<days>(system_clock::now()); }

}  // namespace adopt
