#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "twsbench/dataset.hpp"
#include "twsbench/synthetic.hpp"

namespace fixtures {

using twsbench::BasinSeries;
using twsbench::Date;
using twsbench::Resolution;

// A basin whose channels and target come from `f(channel, t)`; channel 4 is the target.
inline BasinSeries make_series(const std::string& id, std::size_t length,
                               const std::function<double(int, std::size_t)>& f,
                               Date start = twsbench::make_date(2003, 1, 1),
                               Resolution res = Resolution::Monthly) {
  BasinSeries s;
  s.basin_id = id;
  s.axis = twsbench::TimeAxis(start, res, length);
  s.dynamic.resize(static_cast<Eigen::Index>(length), 4);
  s.target.resize(static_cast<Eigen::Index>(length));
  for (std::size_t t = 0; t < length; ++t) {
    for (int c = 0; c < 4; ++c) s.dynamic(static_cast<Eigen::Index>(t), c) = f(c, t);
    s.target[static_cast<Eigen::Index>(t)] = f(4, t);
  }
  for (std::size_t i = 0; i < s.statics.size(); ++i) s.statics[i] = static_cast<double>(i + 1);
  return s;
}

// Random-walk-free noise series: every channel and the target are iid normal draws.
inline BasinSeries noise_series(const std::string& id, std::size_t length, std::uint64_t seed,
                                Date start = twsbench::make_date(2003, 1, 1), Resolution res = Resolution::Monthly) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> vals(length * 5);
  for (auto& v : vals) v = n01(rng);
  return make_series(id, length, [&](int c, std::size_t t) { return vals[t * 5 + static_cast<std::size_t>(c)]; }, start,
                     res);
}

inline twsbench::SyntheticConfig small_world(std::size_t n_basins = 4, std::uint64_t seed = 7) {
  return twsbench::SyntheticConfig::ol_like(n_basins, seed);
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("twsbench_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixtures
