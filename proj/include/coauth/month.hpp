#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace coauth {

/// Calendar month; the pipeline's time resolution.
struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  auto operator<=>(const YearMonth&) const = default;

  /// Months elapsed since year 0, January.
  int ordinal() const { return year * 12 + (month - 1); }
  static YearMonth from_ordinal(int ordinal);

  YearMonth plus_months(int n) const { return from_ordinal(ordinal() + n); }
  int months_since(YearMonth origin) const { return ordinal() - origin.ordinal(); }

  /// "YYYY-MM"
  std::string str() const;

  /// Accepts "YYYY-MM" or "YYYY-MM-DD" (the day is ignored).
  static std::optional<YearMonth> parse(std::string_view text);
};

}  // namespace coauth
