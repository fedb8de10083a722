#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace newsflow {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
 public:
  Date() = default;

  static Date from_ymd(int year, int month, int day);
  static Date from_days(std::int32_t days) { return Date(days); }

  /// Parses strict ISO-8601 "YYYY-MM-DD". Throws ParseError otherwise.
  static Date parse(std::string_view iso);

  std::string iso() const;
  std::int32_t days() const { return days_; }

  int year() const;
  int month() const;
  int day() const;
  /// 0 = Sunday ... 6 = Saturday.
  int weekday() const;

  Date operator+(int n) const { return Date(days_ + n); }
  Date operator-(int n) const { return Date(days_ - n); }
  auto operator<=>(const Date&) const = default;

 private:
  explicit Date(std::int32_t days) : days_(days) {}
  std::int32_t days_ = 0;
};

}  // namespace newsflow
