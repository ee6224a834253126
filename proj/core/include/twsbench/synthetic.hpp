#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "twsbench/calendar.hpp"
#include "twsbench/dataset.hpp"
#include "twsbench/random.hpp"

namespace twsbench {

/// Desk-scale stand-in for basin-averaged reanalysis data.
///
/// Each dynamic channel is a per-basin base value plus a seasonal sinusoid plus AR(1) noise.
/// The target mixes the normalized lag-1 channel anomalies, adds its own seasonal cycle, a
/// linear trend (trended basins only) and AR(1) noise. Zero trend and zero drift give the
/// stationary "OL-like" regime; a negative trend and seasonality drift give the "DA-like" one.
struct SyntheticConfig {
  std::size_t n_basins = 16;
  Date start_date = make_date(2003, 1, 1);
  Resolution resolution = Resolution::Monthly;
  std::size_t length = 216;

  std::array<double, kDynamicChannels> seasonal_amplitude{40.0, 10.0, 1.0, 0.08};
  double target_seasonal_amplitude = 30.0;
  double ar_coef = 0.5;           // AR(1) coefficient for channel and target noise, in [0, 1)
  double noise_scale = 5.0;       // target noise std [mm]
  double channel_noise = 0.5;     // channel noise std as a fraction of the channel amplitude
  double trend_slope = 0.0;       // [mm/month] applied to trended basins
  double trend_fraction = 1.0;    // share of basins carrying the trend
  double seasonality_drift = 0.0; // phase drift [cycles/year]

  // Target response [mm] per unit normalized lag-1 anomaly of each channel.
  std::array<double, kDynamicChannels> mixing_weights{25.0, -10.0, 8.0, 30.0};
  // Optional second regime used by a share of basins (heterogeneity experiments).
  std::array<double, kDynamicChannels> alt_mixing_weights{25.0, -10.0, 8.0, 30.0};
  double alt_fraction = 0.0;
  double weight_jitter = 0.0;     // relative per-basin N(0, jitter) perturbation of weights
  double threshold_weight = 0.0;  // adds weight * 1[precip anomaly(t-1) > 0]

  std::uint64_t seed = 42;

  void validate() const;

  static SyntheticConfig ol_like(std::size_t n_basins, std::uint64_t seed);
  static SyntheticConfig da_like(std::size_t n_basins, std::uint64_t seed);
};

// Keys present in the JSON object override `base`; unknown keys are rejected.
SyntheticConfig synthetic_config_from_json(std::string_view json_text, const SyntheticConfig& base = {});
std::string synthetic_config_to_json(const SyntheticConfig& cfg);

// Deterministic in (config, seed); each basin draws from its own stream so the output does not
// depend on generation order.
std::vector<BasinSeries> generate_synthetic(const SyntheticConfig& cfg);

// Whether basin `index` of `n` belongs to an evenly spread share `fraction` of basins.
bool in_even_share(std::size_t index, std::size_t n, double fraction);

// Per-basin mixing weights actually used by the generator (after regime and jitter).
std::array<double, kDynamicChannels> synthetic_mixing_weights(const SyntheticConfig& cfg,
                                                             std::size_t basin_index);

std::string synthetic_basin_id(std::size_t index);

}  // namespace twsbench
