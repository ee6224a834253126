#include "twsbench/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <json.hpp>

#include "twsbench/errors.hpp"

namespace twsbench {

namespace {

constexpr std::array<double, kDynamicChannels> kBase{80.0, 285.0, 2.0, 0.25};
constexpr std::array<double, kDynamicChannels> kPhase{0.0, -0.15, 0.1, 0.05};

double months_elapsed(std::int64_t step, Resolution r) {
  return r == Resolution::Monthly ? static_cast<double>(step) : static_cast<double>(step) * 12.0 / 365.2425;
}

}  // namespace

bool in_even_share(std::size_t index, std::size_t n, double fraction) {
  if (n == 0 || fraction <= 0.0) return false;
  if (fraction >= 1.0) return true;
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  // floor((i+1)k/n) > floor(ik/n) picks exactly k indices spread evenly over [0, n)
  return (index + 1) * k / n > index * k / n;
}

std::string synthetic_basin_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "B%04zu", index + 1);
  return buf;
}

void SyntheticConfig::validate() const {
  if (n_basins < 1) fail(ErrorKind::InvalidConfig, "n_basins must be >= 1");
  if (length < 1) fail(ErrorKind::InvalidConfig, "length must be >= 1");
  if (!(ar_coef >= 0.0 && ar_coef < 1.0)) fail(ErrorKind::InvalidConfig, "ar_coef must lie in [0, 1)");
  if (!(noise_scale >= 0.0) || !(channel_noise >= 0.0) || !(weight_jitter >= 0.0))
    fail(ErrorKind::InvalidConfig, "noise scales must be non-negative");
  if (!(trend_fraction >= 0.0 && trend_fraction <= 1.0) || !(alt_fraction >= 0.0 && alt_fraction <= 1.0))
    fail(ErrorKind::InvalidConfig, "fractions must lie in [0, 1]");
  if (!start_date.ok()) fail(ErrorKind::InvalidConfig, "invalid start_date");
  if (resolution == Resolution::Monthly && static_cast<unsigned>(start_date.day()) != 1)
    fail(ErrorKind::InvalidConfig, "monthly start_date must be the first of a month");
}

SyntheticConfig SyntheticConfig::ol_like(std::size_t n_basins, std::uint64_t seed) {
  SyntheticConfig c;
  c.n_basins = n_basins;
  c.seed = seed;
  return c;
}

SyntheticConfig SyntheticConfig::da_like(std::size_t n_basins, std::uint64_t seed) {
  SyntheticConfig c;
  c.n_basins = n_basins;
  c.seed = seed;
  c.trend_slope = -2.0;
  c.trend_fraction = 0.5;
  c.seasonality_drift = 0.01;
  return c;
}

std::array<double, kDynamicChannels> synthetic_mixing_weights(const SyntheticConfig& cfg,
                                                             std::size_t basin_index) {
  auto w = in_even_share(basin_index, cfg.n_basins, cfg.alt_fraction) ? cfg.alt_mixing_weights
                                                                       : cfg.mixing_weights;
  if (cfg.weight_jitter > 0.0) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 1'000'003ULL + basin_index));
    std::normal_distribution<double> n01(0.0, 1.0);
    for (auto& x : w) x *= 1.0 + cfg.weight_jitter * n01(rng);
  }
  return w;
}

std::vector<BasinSeries> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double innov = std::sqrt(1.0 - cfg.ar_coef * cfg.ar_coef);

  std::vector<BasinSeries> out;
  out.reserve(cfg.n_basins);
  for (std::size_t b = 0; b < cfg.n_basins; ++b) {
    std::mt19937_64 rng(mix_seed(cfg.seed, b));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> n01(0.0, 1.0);

    const bool trended = in_even_share(b, cfg.n_basins, cfg.trend_fraction) && cfg.trend_slope != 0.0;
    const double phase = u01(rng);
    std::array<double, kDynamicChannels> base{};
    for (std::size_t c = 0; c < kDynamicChannels; ++c) base[c] = kBase[c] * (0.8 + 0.4 * u01(rng));
    if (cfg.resolution == Resolution::Daily) base[0] /= 30.4375;
    auto amp = cfg.seasonal_amplitude;
    if (cfg.resolution == Resolution::Daily) amp[0] /= 30.4375;
    const auto weights = synthetic_mixing_weights(cfg, b);

    const std::size_t n = cfg.length;
    BasinSeries s;
    s.basin_id = synthetic_basin_id(b);
    s.axis = TimeAxis(cfg.start_date, cfg.resolution, n);
    s.dynamic.resize(static_cast<Eigen::Index>(n), kDynamicChannels);
    s.target.resize(static_cast<Eigen::Index>(n));

    std::array<double, kDynamicChannels> eta{};
    for (auto& e : eta) e = n01(rng);
    double nu = n01(rng);
    // one burn-in step so the lag-1 anomaly exists at t = 0
    std::array<double, kDynamicChannels> prev_anomaly{};
    for (std::int64_t t = -1; t < static_cast<std::int64_t>(n); ++t) {
      const double m = months_elapsed(t, cfg.resolution);
      const double cycle = m / 12.0 + phase + cfg.seasonality_drift * m / 12.0;
      std::array<double, kDynamicChannels> anomaly{};
      for (std::size_t c = 0; c < kDynamicChannels; ++c) {
        eta[c] = cfg.ar_coef * eta[c] + innov * n01(rng);
        double x = base[c] + amp[c] * std::sin(two_pi * (cycle + kPhase[c])) + amp[c] * cfg.channel_noise * eta[c];
        if (c == 0 || c == 2) x = std::max(x, 0.0);
        if (c == 3) x = std::clamp(x, 0.01, 0.6);
        anomaly[c] = (x - base[c]) / amp[c];
        if (t >= 0) s.dynamic(t, static_cast<Eigen::Index>(c)) = x;
      }
      nu = cfg.ar_coef * nu + innov * n01(rng);
      if (t >= 0) {
        double y = cfg.target_seasonal_amplitude * std::sin(two_pi * (cycle + 0.25));
        for (std::size_t c = 0; c < kDynamicChannels; ++c) y += weights[c] * prev_anomaly[c];
        if (prev_anomaly[0] > 0.0) y += cfg.threshold_weight;
        if (trended) y += cfg.trend_slope * m;
        y += cfg.noise_scale * nu;
        s.target[t] = y;
      }
      prev_anomaly = anomaly;
    }

    // statics: terrain/soil/land-cover draws, then climatologies as the annual mean of the
    // per-calendar-month means of each channel
    auto& st = s.statics;
    st[0] = 3000.0 * u01(rng);
    st[1] = 20.0 * u01(rng);
    const double a = u01(rng) + 0.1, bb = u01(rng) + 0.1, cc = u01(rng) + 0.1;
    st[2] = a / (a + bb + cc);
    st[3] = bb / (a + bb + cc);
    st[4] = cc / (a + bb + cc);
    st[5] = 0.8 * u01(rng);
    st[6] = trended ? 0.5 + 0.4 * u01(rng) : 0.3 * u01(rng);
    st[7] = std::exp(std::log(1e3) + (std::log(1e6) - std::log(1e3)) * u01(rng));
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t c = k == 0 ? 0 : (k == 1 ? 1 : 2);
      std::array<double, 12> sum{};
      std::array<std::size_t, 12> cnt{};
      for (std::size_t t = 0; t < n; ++t) {
        const unsigned mo = static_cast<unsigned>(s.axis.date_at(t).month()) - 1;
        sum[mo] += s.dynamic(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c));
        ++cnt[mo];
      }
      double acc = 0.0;
      std::size_t months = 0;
      for (std::size_t mo = 0; mo < 12; ++mo)
        if (cnt[mo]) {
          acc += sum[mo] / static_cast<double>(cnt[mo]);
          ++months;
        }
      st[kClimatologyOffset + k] = acc / static_cast<double>(months);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---- JSON ------------------------------------------------------------------

SyntheticConfig synthetic_config_from_json(std::string_view json_text, const SyntheticConfig& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("synthetic config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::InvalidConfig, "synthetic config must be a JSON object");
  SyntheticConfig c = base;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "n_basins") {
        const auto n = v.get<long long>();
        if (n < 1) fail(ErrorKind::InvalidConfig, "n_basins must be >= 1");
        c.n_basins = static_cast<std::size_t>(n);
      } else if (k == "start_date") {
        const auto d = parse_date(v.get<std::string>());
        if (!d) fail(ErrorKind::InvalidConfig, "bad start_date");
        c.start_date = *d;
      } else if (k == "resolution") {
        c.resolution = parse_resolution(v.get<std::string>());
      } else if (k == "length") {
        const auto n = v.get<long long>();
        if (n < 1) fail(ErrorKind::InvalidConfig, "length must be >= 1");
        c.length = static_cast<std::size_t>(n);
      } else if (k == "seasonal_amplitude") {
        c.seasonal_amplitude = v.get<std::array<double, kDynamicChannels>>();
      } else if (k == "target_seasonal_amplitude") {
        c.target_seasonal_amplitude = v.get<double>();
      } else if (k == "ar_coef") {
        c.ar_coef = v.get<double>();
      } else if (k == "noise_scale") {
        c.noise_scale = v.get<double>();
      } else if (k == "channel_noise") {
        c.channel_noise = v.get<double>();
      } else if (k == "trend_slope") {
        c.trend_slope = v.get<double>();
      } else if (k == "trend_fraction") {
        c.trend_fraction = v.get<double>();
      } else if (k == "seasonality_drift") {
        c.seasonality_drift = v.get<double>();
      } else if (k == "mixing_weights") {
        c.mixing_weights = v.get<std::array<double, kDynamicChannels>>();
      } else if (k == "alt_mixing_weights") {
        c.alt_mixing_weights = v.get<std::array<double, kDynamicChannels>>();
      } else if (k == "alt_fraction") {
        c.alt_fraction = v.get<double>();
      } else if (k == "weight_jitter") {
        c.weight_jitter = v.get<double>();
      } else if (k == "threshold_weight") {
        c.threshold_weight = v.get<double>();
      } else if (k == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else {
        fail(ErrorKind::InvalidConfig, "unknown synthetic config key '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("synthetic config type error: ") + e.what());
  }
  c.validate();
  return c;
}

std::string synthetic_config_to_json(const SyntheticConfig& c) {
  nlohmann::ordered_json j;
  j["n_basins"] = c.n_basins;
  j["start_date"] = format_date(c.start_date);
  j["resolution"] = std::string(to_string(c.resolution));
  j["length"] = c.length;
  j["seasonal_amplitude"] = c.seasonal_amplitude;
  j["target_seasonal_amplitude"] = c.target_seasonal_amplitude;
  j["ar_coef"] = c.ar_coef;
  j["noise_scale"] = c.noise_scale;
  j["channel_noise"] = c.channel_noise;
  j["trend_slope"] = c.trend_slope;
  j["trend_fraction"] = c.trend_fraction;
  j["seasonality_drift"] = c.seasonality_drift;
  j["mixing_weights"] = c.mixing_weights;
  j["alt_mixing_weights"] = c.alt_mixing_weights;
  j["alt_fraction"] = c.alt_fraction;
  j["weight_jitter"] = c.weight_jitter;
  j["threshold_weight"] = c.threshold_weight;
  j["seed"] = c.seed;
  return j.dump(2);
}

}  // namespace twsbench
