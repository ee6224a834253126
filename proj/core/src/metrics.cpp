#include "twsbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "twsbench/errors.hpp"

namespace twsbench {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool is_constant(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo == *hi;
}

}  // namespace

MetricSet compute_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size())
    fail(ErrorKind::ShapeMismatch, "metric inputs have lengths " + std::to_string(y_true.size()) + " and " +
                                       std::to_string(y_pred.size()));
  if (y_true.empty()) fail(ErrorKind::EmptyInput, "metric inputs are empty");
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (!std::isfinite(y_true[i]) || !std::isfinite(y_pred[i]))
      fail(ErrorKind::NonFinite, "non-finite value at position " + std::to_string(i));

  const double T = static_cast<double>(y_true.size());
  const double mu_t = mean_of(y_true);
  const double mu_p = mean_of(y_pred);
  double sse = 0.0, sst = 0.0, spp = 0.0, stp = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_pred[i] - y_true[i];
    diff += e;
    sse += e * e;
    const double dt = y_true[i] - mu_t;
    const double dp = y_pred[i] - mu_p;
    sst += dt * dt;
    spp += dp * dp;
    stp += dt * dp;
  }

  MetricSet m;
  m.bias = diff / T;
  m.rmse = std::sqrt(sse / T);
  if (sst > 0.0) m.nse = 1.0 - sse / sst;
  if (!is_constant(y_true) && !is_constant(y_pred)) m.corr = std::clamp(stp / std::sqrt(sst * spp), -1.0, 1.0);

  const double sd_t = std::sqrt(sst / T);
  const double sd_p = std::sqrt(spp / T);
  if (sd_t > 0.0 && std::abs(mu_t) >= kKgeMeanGuard * (sd_t + 1e-12) && m.corr) {
    const double alpha = sd_p / sd_t;
    const double beta = mu_p / mu_t;
    const double r = *m.corr;
    m.kge = 1.0 - std::sqrt((r - 1.0) * (r - 1.0) + (alpha - 1.0) * (alpha - 1.0) + (beta - 1.0) * (beta - 1.0));
  }
  return m;
}

std::optional<double> MetricSet::get(std::string_view metric) const {
  if (metric == "bias") return bias;
  if (metric == "abs_bias") return std::abs(bias);
  if (metric == "rmse") return rmse;
  if (metric == "corr") return corr;
  if (metric == "nse") return nse;
  if (metric == "kge") return kge;
  fail(ErrorKind::InvalidConfig, "unknown metric '" + std::string(metric) + "'");
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"bias", "rmse", "corr", "nse", "kge"};
  return names;
}

bool higher_is_better(std::string_view metric) { return metric == "corr" || metric == "nse" || metric == "kge"; }

bool is_known_metric(std::string_view metric) {
  return metric == "bias" || metric == "abs_bias" || metric == "rmse" || metric == "corr" || metric == "nse" ||
         metric == "kge";
}

}  // namespace twsbench
