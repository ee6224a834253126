#include "twsbench/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "twsbench/errors.hpp"

namespace twsbench {

namespace chr = std::chrono;

std::string_view to_string(Resolution r) { return r == Resolution::Monthly ? "monthly" : "daily"; }

Resolution parse_resolution(std::string_view text) {
  if (text == "monthly") return Resolution::Monthly;
  if (text == "daily") return Resolution::Daily;
  fail(ErrorKind::InvalidConfig, "unknown resolution '" + std::string(text) + "'");
}

namespace {
bool parse_uint(std::string_view s, unsigned& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}
}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  unsigned y = 0, m = 0, d = 0;
  if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
      !parse_uint(text.substr(8, 2), d))
    return std::nullopt;
  Date date{chr::year{static_cast<int>(y)}, chr::month{m}, chr::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date make_date(int y, unsigned m, unsigned d) {
  return Date{chr::year{y}, chr::month{m}, chr::day{d}};
}

std::int64_t steps_between(const Date& from, const Date& to, Resolution r) {
  if (r == Resolution::Monthly) {
    const auto a = static_cast<std::int64_t>(static_cast<int>(from.year())) * 12 +
                   static_cast<unsigned>(from.month());
    const auto b = static_cast<std::int64_t>(static_cast<int>(to.year())) * 12 +
                   static_cast<unsigned>(to.month());
    return b - a;
  }
  return (chr::sys_days{to} - chr::sys_days{from}).count();
}

Date advance(const Date& d, std::int64_t steps, Resolution r) {
  if (r == Resolution::Monthly) {
    return Date{d.year(), d.month(), chr::day{1}} + chr::months{steps};
  }
  return Date{chr::sys_days{d} + chr::days{steps}};
}

TimeAxis::TimeAxis(Date start, Resolution resolution, std::size_t length)
    : start_(start), resolution_(resolution), length_(length) {
  if (!start.ok()) fail(ErrorKind::InvalidConfig, "invalid axis start date");
  if (length == 0) fail(ErrorKind::InvalidConfig, "time axis must have at least one step");
  if (resolution == Resolution::Monthly && static_cast<unsigned>(start.day()) != 1)
    fail(ErrorKind::InvalidConfig, "monthly axis must start on the first of a month");
}

Date TimeAxis::date_at(std::size_t i) const {
  return advance(start_, static_cast<std::int64_t>(i), resolution_);
}

std::optional<std::size_t> TimeAxis::index_of(const Date& d) const {
  if (resolution_ == Resolution::Monthly && static_cast<unsigned>(d.day()) != 1) return std::nullopt;
  const auto k = steps_between(start_, d, resolution_);
  if (k < 0 || static_cast<std::size_t>(k) >= length_) return std::nullopt;
  return static_cast<std::size_t>(k);
}

std::size_t TimeAxis::lower_bound(const Date& d) const {
  auto k = steps_between(start_, d, resolution_);
  if (resolution_ == Resolution::Monthly && static_cast<unsigned>(d.day()) != 1) ++k;
  if (k < 0) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(k), length_);
}

}  // namespace twsbench
