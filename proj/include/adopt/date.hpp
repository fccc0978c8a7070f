#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace adopt {

// Calendar dates are UTC days throughout.
using Date = std::chrono::sys_days;

Date make_date(int year, unsigned month, unsigned day);

// Strict ISO-8601 "YYYY-MM-DD"; rejects impossible dates such as 2025-02-30.
std::optional<Date> parse_date(std::string_view text);
Date parse_date_or_throw(std::string_view text, const std::string& module);
std::string format_date(Date date);

// "YYYY-MM", used to name calendar months in reports and errors.
std::string format_month(Date date);

Date month_start(Date date);
Date next_month_start(Date date);
Date add_days(Date date, int days);
int days_between(Date from, Date to);

Date utc_today();

}  // namespace adopt
