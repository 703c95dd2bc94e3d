#ifndef PANELSHOCK_DATES_HPP
#define PANELSHOCK_DATES_HPP

#include <compare>
#include <string>
#include <vector>

namespace panelshock {

// Calendar date, ISO-8601 "YYYY-MM-DD" on the wire.
struct Date {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;    // 1..31

  auto operator<=>(const Date&) const = default;
};

Date parse_date(const std::string& text);
std::string format_date(const Date& d);

// Month at monthly frequency, normalized to first-of-month on emission.
struct YearMonth {
  int year = 0;
  int month = 0;  // 1..12

  auto operator<=>(const YearMonth&) const = default;

  // months since year 0, for arithmetic
  int index() const { return year * 12 + (month - 1); }
  static YearMonth from_index(int idx);
};

YearMonth month_of(const Date& d);
// Accepts "YYYY-MM" or a full date (day ignored).
YearMonth parse_month(const std::string& text);
std::string format_month(const YearMonth& m);
// First-of-month date for CSV emission.
Date first_day(const YearMonth& m);

// Inclusive month range [start, end].
struct MonthRange {
  YearMonth start;
  YearMonth end;

  int length() const { return end.index() - start.index() + 1; }
  bool contains(const YearMonth& m) const {
    return m.index() >= start.index() && m.index() <= end.index();
  }
  std::vector<YearMonth> months() const;
};

}  // namespace panelshock

#endif
