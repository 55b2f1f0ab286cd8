#include "mktcorr/date.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "mktcorr/errors.hpp"

namespace mktcorr {

namespace {

int parse_fixed(std::string_view text, std::string_view field) {
  int value = 0;
  for (char ch : field) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw DataError("invalid date '" + std::string(text) + "': expected YYYY-MM-DD");
    }
  }
  std::from_chars(field.data(), field.data() + field.size(), value);
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw DataError("invalid date '" + std::string(text) + "': expected YYYY-MM-DD");
  }
  const int y = parse_fixed(text, text.substr(0, 4));
  const int m = parse_fixed(text, text.substr(5, 2));
  const int d = parse_fixed(text, text.substr(8, 2));
  const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) {
    throw DataError("invalid calendar date '" + std::string(text) + "'");
  }
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::vector<Date> weekday_calendar(Date first, std::size_t count) {
  using namespace std::chrono;
  std::vector<Date> out;
  out.reserve(count);
  sys_days day{first};
  while (out.size() < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) out.emplace_back(day);
    day += days{1};
  }
  return out;
}

}  // namespace mktcorr
