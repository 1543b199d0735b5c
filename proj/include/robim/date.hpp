#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "robim/error.hpp"

namespace robim {

// Calendar date without time of day; schedule granularity is daily.
struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  static bool leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  }

  static int days_in_month(int y, int m) {
    static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && leap(y)) return 29;
    return d[m - 1];
  }

  // Parses strict ISO "YYYY-MM-DD".
  static Date parse(const std::string& s) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3 ||
        s.size() != 10) {
      fail(ErrorKind::parse, "invalid date '" + s + "' (expected YYYY-MM-DD)");
    }
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
      fail(ErrorKind::parse, "invalid calendar date '" + s + "'");
    }
    return {y, m, d};
  }

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
  }
};

}  // namespace robim
