#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mktcorr {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws DataError.
Date parse_date(std::string_view text);

std::string format_date(const Date& d);

/// `count` consecutive Monday-to-Friday dates beginning at the first weekday on or after `first`.
std::vector<Date> weekday_calendar(Date first, std::size_t count);

}  // namespace mktcorr
