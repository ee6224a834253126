#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "twsbench/dataset.hpp"
#include "twsbench/errors.hpp"

namespace twsbench {

namespace {

constexpr std::string_view kDynamicHeader = "basin_id,date,precip,temp,lai,ssmc,tws";
constexpr std::string_view kStaticHeader =
    "basin_id,elev,slope,sand,silt,clay,forest,crop,area,clim_precip,clim_temp,clim_lai";

class Collector {
 public:
  explicit Collector(bool throw_first) : throw_first_(throw_first) {}

  void add(ErrorKind kind, const std::string& message) {
    if (throw_first_) fail(kind, message);
    out_.push_back({std::string(to_string(kind)), message});
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  bool throw_first_;
  std::vector<Violation> out_;
};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

// Returns false for empty or unparsable cells; NaN/inf parse but are rejected by the caller.
bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

struct DynamicRows {
  std::vector<Date> dates;
  std::vector<std::array<double, kDynamicChannels + 1>> values;
  bool bad = false;
};

std::map<std::string, DynamicRows> parse_dynamic(const std::string& path, Collector& col) {
  std::map<std::string, DynamicRows> basins;
  const auto lines = read_lines(path);
  if (lines.empty()) {
    col.add(ErrorKind::Schema, path + ": empty dynamic file");
    return basins;
  }
  if (lines[0] != kDynamicHeader) {
    col.add(ErrorKind::Schema, path + ": expected header '" + std::string(kDynamicHeader) + "'");
    return basins;
  }
  if (lines.size() == 1) col.add(ErrorKind::Schema, path + ": no data rows");
  std::string previous_id;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    const std::string where = path + ":" + std::to_string(li + 1);
    if (fields.size() != 7) {
      col.add(ErrorKind::Schema, where + ": expected 7 columns, found " + std::to_string(fields.size()));
      continue;
    }
    const std::string id(fields[0]);
    if (id.empty()) {
      col.add(ErrorKind::Schema, where + ": empty basin_id");
      continue;
    }
    if (id != previous_id) {
      if (basins.count(id) || (!previous_id.empty() && id < previous_id))
        col.add(ErrorKind::Schema, where + ": rows are not sorted by basin_id (" + id + ")");
      previous_id = id;
    }
    auto& rows = basins[id];
    const auto date = parse_date(fields[1]);
    if (!date) {
      col.add(ErrorKind::Schema, where + ": bad date '" + std::string(fields[1]) + "'");
      rows.bad = true;
      continue;
    }
    std::array<double, kDynamicChannels + 1> v{};
    bool ok = true;
    for (std::size_t c = 0; c < v.size(); ++c) {
      const std::string_view name = c < kDynamicChannels ? kDynamicNames[c] : kTargetName;
      if (!parse_double(fields[c + 2], v[c]) || !std::isfinite(v[c])) {
        col.add(ErrorKind::MissingValue,
                "basin " + id + " date " + format_date(*date) + " column " + std::string(name));
        ok = false;
      }
    }
    if (!ok) rows.bad = true;
    rows.dates.push_back(*date);
    rows.values.push_back(v);
  }
  return basins;
}

std::map<std::string, StaticVector> parse_static(const std::string& path, Collector& col) {
  std::map<std::string, StaticVector> out;
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kStaticHeader) {
    col.add(ErrorKind::Schema, path + ": expected header '" + std::string(kStaticHeader) + "'");
    return out;
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    const std::string where = path + ":" + std::to_string(li + 1);
    if (fields.size() != kStaticFeatures + 1) {
      col.add(ErrorKind::Schema, where + ": expected 12 columns");
      continue;
    }
    const std::string id(fields[0]);
    if (out.count(id)) {
      col.add(ErrorKind::Schema, where + ": duplicate basin_id " + id);
      continue;
    }
    StaticVector v{};
    bool ok = true;
    for (std::size_t k = 0; k < kStaticFeatures; ++k) {
      if (!parse_double(fields[k + 1], v[k]) || !std::isfinite(v[k])) {
        col.add(ErrorKind::MissingValue, "basin " + id + " static column " + std::string(kStaticNames[k]));
        ok = false;
      }
    }
    if (ok) out.emplace(id, v);
  }
  return out;
}

// Infers the resolution from the first step and checks every later step is exactly one step on.
std::optional<Resolution> check_axis(const std::string& id, const std::vector<Date>& dates, Collector& col) {
  if (dates.empty()) return std::nullopt;
  Resolution res = static_cast<unsigned>(dates[0].day()) == 1 ? Resolution::Monthly : Resolution::Daily;
  if (dates.size() >= 2 && steps_between(dates[0], dates[1], Resolution::Daily) == 1)
    res = Resolution::Daily;
  bool ok = true;
  for (std::size_t i = 1; i < dates.size(); ++i) {
    const bool aligned = res == Resolution::Daily || static_cast<unsigned>(dates[i].day()) == 1;
    if (!aligned || steps_between(dates[i - 1], dates[i], res) != 1) {
      col.add(ErrorKind::Gap, "basin " + id + " discontinuity between " + format_date(dates[i - 1]) +
                                  " and " + format_date(dates[i]));
      ok = false;
      break;
    }
  }
  if (res == Resolution::Monthly && static_cast<unsigned>(dates[0].day()) != 1) ok = false;
  return ok ? std::optional<Resolution>(res) : std::nullopt;
}

std::vector<BasinSeries> load_impl(const std::string& dynamic_path, const std::string& static_path,
                                   Collector& col) {
  auto dyn = parse_dynamic(dynamic_path, col);
  auto stat = parse_static(static_path, col);
  std::vector<BasinSeries> out;
  for (auto& [id, rows] : dyn) {
    const auto res = check_axis(id, rows.dates, col);
    const auto sit = stat.find(id);
    if (sit == stat.end()) col.add(ErrorKind::OrphanBasin, "basin " + id + " has no row in the static file");
    if (!res || rows.bad || sit == stat.end()) continue;
    BasinSeries s;
    s.basin_id = id;
    s.axis = TimeAxis(rows.dates.front(), *res, rows.dates.size());
    const auto n = static_cast<Eigen::Index>(rows.dates.size());
    s.dynamic.resize(n, kDynamicChannels);
    s.target.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(kDynamicChannels); ++c)
        s.dynamic(t, c) = rows.values[t][c];
      s.target[t] = rows.values[t][kDynamicChannels];
    }
    s.statics = sit->second;
    out.push_back(std::move(s));
  }
  return out;  // std::map iteration keeps ascending basin_id order
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) fail(ErrorKind::Io, "number formatting failed");
  return std::string(buf, p);
}

std::vector<BasinSeries> load_basin_series(const std::string& dynamic_path, const std::string& static_path) {
  Collector col(true);
  return load_impl(dynamic_path, static_path, col);
}

std::vector<Violation> validate_dataset_files(const std::string& dynamic_path,
                                              const std::string& static_path) {
  Collector col(false);
  try {
    load_impl(dynamic_path, static_path, col);
  } catch (const Error& e) {
    col.add(e.kind(), e.what());
  }
  return col.take();
}

void write_basin_series(const std::vector<BasinSeries>& series, const std::string& dynamic_path,
                        const std::string& static_path) {
  std::ofstream dyn(dynamic_path, std::ios::binary);
  std::ofstream st(static_path, std::ios::binary);
  if (!dyn) fail(ErrorKind::Io, "cannot write " + dynamic_path);
  if (!st) fail(ErrorKind::Io, "cannot write " + static_path);

  std::vector<const BasinSeries*> order;
  for (const auto& s : series) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const BasinSeries* a, const BasinSeries* b) { return a->basin_id < b->basin_id; });

  dyn << kDynamicHeader << '\n';
  st << kStaticHeader << '\n';
  for (const auto* s : order) {
    std::string buf;
    for (std::size_t t = 0; t < s->length(); ++t) {
      const auto i = static_cast<Eigen::Index>(t);
      buf.clear();
      buf += s->basin_id;
      buf += ',';
      buf += format_date(s->axis.date_at(t));
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(kDynamicChannels); ++c) {
        buf += ',';
        buf += format_double(s->dynamic(i, c));
      }
      buf += ',';
      buf += format_double(s->target[i]);
      buf += '\n';
      dyn << buf;
    }
    st << s->basin_id;
    for (double v : s->statics) st << ',' << format_double(v);
    st << '\n';
  }
  if (!dyn || !st) fail(ErrorKind::Io, "write failed for dataset files");
}

}  // namespace twsbench
