#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace twsbench {

using Date = std::chrono::year_month_day;

enum class Resolution { Monthly, Daily };

std::string_view to_string(Resolution r);
Resolution parse_resolution(std::string_view text);

// Strict `YYYY-MM-DD`; returns nullopt on anything else (including invalid days).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

Date make_date(int y, unsigned m, unsigned d);

// Signed number of resolution steps from `from` to `to`. Monthly ignores the day field.
std::int64_t steps_between(const Date& from, const Date& to, Resolution r);
Date advance(const Date& d, std::int64_t steps, Resolution r);

// Gap-free, strictly increasing axis at a fixed resolution.
class TimeAxis {
 public:
  TimeAxis() = default;
  TimeAxis(Date start, Resolution resolution, std::size_t length);

  const Date& start() const { return start_; }
  Resolution resolution() const { return resolution_; }
  std::size_t length() const { return length_; }

  Date date_at(std::size_t i) const;
  Date end() const { return date_at(length_ - 1); }
  // Index of `d` on this axis, nullopt when outside or not on a step boundary.
  std::optional<std::size_t> index_of(const Date& d) const;
  // First index whose date is >= d (may equal length()).
  std::size_t lower_bound(const Date& d) const;

  bool operator==(const TimeAxis&) const = default;

 private:
  Date start_{std::chrono::year{1970}, std::chrono::month{1}, std::chrono::day{1}};
  Resolution resolution_ = Resolution::Monthly;
  std::size_t length_ = 0;
};

}  // namespace twsbench
