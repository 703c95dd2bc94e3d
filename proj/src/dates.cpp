#include "panelshock/dates.hpp"

#include <charconv>
#include <cstdio>

#include "panelshock/errors.hpp"

namespace panelshock {

namespace {

int parse_int_field(const std::string& text, size_t pos, size_t len, const std::string& what) {
  if (pos + len > text.size()) fail(ErrorCategory::ParseError, "malformed " + what + ": '" + text + "'");
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc() || ptr != text.data() + pos + len)
    fail(ErrorCategory::ParseError, "malformed " + what + ": '" + text + "'");
  return value;
}

}  // namespace

Date parse_date(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    fail(ErrorCategory::ParseError, "expected ISO-8601 date YYYY-MM-DD, got '" + text + "'");
  Date d;
  d.year = parse_int_field(text, 0, 4, "date");
  d.month = parse_int_field(text, 5, 2, "date");
  d.day = parse_int_field(text, 8, 2, "date");
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
    fail(ErrorCategory::ParseError, "date out of range: '" + text + "'");
  return d;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

YearMonth YearMonth::from_index(int idx) {
  YearMonth m;
  m.year = idx / 12;
  m.month = idx % 12 + 1;
  if (idx < 0 && idx % 12 != 0) {  // floor division for negative indexes
    m.year -= 1;
    m.month = idx - (m.year * 12) + 1;
  }
  return m;
}

YearMonth month_of(const Date& d) { return YearMonth{d.year, d.month}; }

YearMonth parse_month(const std::string& text) {
  if (text.size() == 10) return month_of(parse_date(text));
  if (text.size() != 7 || text[4] != '-')
    fail(ErrorCategory::ParseError, "expected month YYYY-MM, got '" + text + "'");
  YearMonth m;
  m.year = parse_int_field(text, 0, 4, "month");
  m.month = parse_int_field(text, 5, 2, "month");
  if (m.month < 1 || m.month > 12)
    fail(ErrorCategory::ParseError, "month out of range: '" + text + "'");
  return m;
}

std::string format_month(const YearMonth& m) {
  char buf[12];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", m.year, m.month);
  return buf;
}

Date first_day(const YearMonth& m) { return Date{m.year, m.month, 1}; }

std::vector<YearMonth> MonthRange::months() const {
  std::vector<YearMonth> out;
  if (end.index() < start.index())
    fail(ErrorCategory::ConfigError, "empty month window " + format_month(start) + ".." + format_month(end));
  out.reserve(static_cast<size_t>(length()));
  for (int i = start.index(); i <= end.index(); ++i) out.push_back(YearMonth::from_index(i));
  return out;
}

}  // namespace panelshock
