#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace twsbench {

/// Skill scores in physical units. Population (1/T) moments throughout.
/// Undefined quantities are nullopt rather than NaN.
struct MetricSet {
  double bias = 0.0;  // mean(pred - true)
  double rmse = 0.0;
  std::optional<double> corr;
  std::optional<double> nse;
  std::optional<double> kge;

  // Lookup by name: bias, abs_bias, rmse, corr, nse, kge.
  std::optional<double> get(std::string_view metric) const;
};

inline constexpr double kKgeMeanGuard = 1e-9;

MetricSet compute_metrics(std::span<const double> y_true, std::span<const double> y_pred);

// Names accepted by MetricSet::get, in reporting order.
const std::vector<std::string>& metric_names();
// True when larger values are better (corr, nse, kge).
bool higher_is_better(std::string_view metric);
bool is_known_metric(std::string_view metric);

}  // namespace twsbench
