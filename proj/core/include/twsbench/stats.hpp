#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace twsbench {

enum class Alternative { TwoSided, Less, Greater };
enum class TestMethod { Exact, NormalApprox };

std::string_view to_string(Alternative a);
std::string_view to_string(TestMethod m);
Alternative parse_alternative(std::string_view s);

struct SignificanceResult {
  double u = 0.0;  // U of the first sample: R_a - n(n+1)/2
  double p = 1.0;
  Alternative alternative = Alternative::TwoSided;
  TestMethod method = TestMethod::Exact;
};

inline constexpr std::size_t kExactMaxSample = 8;

/// Mann-Whitney U with midranks. "less" tests whether `a` tends to be smaller than `b`.
/// Exact null distribution over all C(n+m, n) labelings when both n, m <= 8; otherwise the
/// normal approximation with tie-corrected variance and 0.5 continuity correction.
SignificanceResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                  Alternative alternative = Alternative::TwoSided);

struct CdfPoint {
  double value;
  double cumulative;
};

struct DistributionSummary {
  std::vector<CdfPoint> cdf;  // one point per distinct value
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  double whisker_low = 0.0, whisker_high = 0.0;
  std::vector<double> outliers;  // ascending
  std::size_t n = 0;
};

// Linear interpolation between order statistics at h = (n-1)q.
double quantile_linear(std::span<const double> sorted, double q);

DistributionSummary empirical_cdf(std::span<const double> values);
/// Quartiles plus Tukey whiskers: the most extreme points within 1.5 IQR of the quartiles.
DistributionSummary boxplot_stats(std::span<const double> values);

struct TrendEstimate {
  double slope = 0.0;  // per step
  double std_error = 0.0;
  double intercept = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  bool significant = false;  // two-sided, 5%
};

TrendEstimate trend_estimate(std::span<const double> series);

}  // namespace twsbench
