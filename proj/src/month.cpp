#include "coauth/month.hpp"

#include <charconv>
#include <cstdio>

namespace coauth {

YearMonth YearMonth::from_ordinal(int ordinal) {
  int year = ordinal / 12;
  int rem = ordinal % 12;
  if (rem < 0) {
    rem += 12;
    --year;
  }
  return {year, rem + 1};
}

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

namespace {

bool parse_digits(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text)
    if (c < '0' || c > '9') return false;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && end == text.data() + text.size();
}

}  // namespace

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
  if (text.size() != 7 && text.size() != 10) return std::nullopt;
  if (text[4] != '-') return std::nullopt;
  YearMonth ym;
  if (!parse_digits(text.substr(0, 4), ym.year)) return std::nullopt;
  if (!parse_digits(text.substr(5, 2), ym.month)) return std::nullopt;
  if (ym.month < 1 || ym.month > 12) return std::nullopt;
  if (text.size() == 10) {
    int day = 0;
    if (text[7] != '-' || !parse_digits(text.substr(8, 2), day) || day < 1 || day > 31)
      return std::nullopt;
  }
  return ym;
}

}  // namespace coauth
