#include "twsbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "twsbench/errors.hpp"

namespace twsbench {

std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Less: return "less";
    case Alternative::Greater: return "greater";
  }
  return "?";
}

std::string_view to_string(TestMethod m) { return m == TestMethod::Exact ? "exact" : "normal-approx"; }

Alternative parse_alternative(std::string_view s) {
  if (s == "two-sided") return Alternative::TwoSided;
  if (s == "less") return Alternative::Less;
  if (s == "greater") return Alternative::Greater;
  fail(ErrorKind::InvalidConfig, "unknown alternative '" + std::string(s) + "'");
}

namespace {

// Doubled midranks (integers) of the pooled sample, in input order a then b.
std::vector<long> doubled_midranks(std::span<const double> pooled, std::vector<std::size_t>& tie_sizes) {
  const std::size_t N = pooled.size();
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
  std::vector<long> r2(N);
  for (std::size_t i = 0; i < N;) {
    std::size_t j = i;
    while (j + 1 < N && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // ranks i+1..j+1, doubled midrank = i+1 + j+1
    const long mid2 = static_cast<long>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r2[order[k]] = mid2;
    tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return r2;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

SignificanceResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  if (a.empty() || b.empty()) fail(ErrorKind::EmptyInput, "Mann-Whitney U needs two nonempty samples");
  for (double v : a)
    if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "non-finite value in first sample");
  for (double v : b)
    if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "non-finite value in second sample");

  const std::size_t n = a.size(), m = b.size(), N = n + m;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> ties;
  const auto r2 = doubled_midranks(pooled, ties);

  long ra2 = 0;
  for (std::size_t i = 0; i < n; ++i) ra2 += r2[i];
  const long offset2 = static_cast<long>(n * (n + 1));  // doubled n(n+1)/2
  const long u2 = ra2 - offset2;

  SignificanceResult res;
  res.u = static_cast<double>(u2) / 2.0;
  res.alternative = alternative;

  double p_less = 1.0, p_greater = 1.0;
  if (n <= kExactMaxSample && m <= kExactMaxSample) {
    res.method = TestMethod::Exact;
    // count[k][s]: subsets of size k of the first i items with doubled rank sum s
    const long max_sum = std::accumulate(r2.begin(), r2.end(), 0L);
    std::vector<std::vector<double>> count(n + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    count[0][0] = 1.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = std::min(i + 1, n); k >= 1; --k)
        for (long s = max_sum; s >= r2[i]; --s) count[k][s] += count[k - 1][s - r2[i]];
    double total = 0.0, le = 0.0, ge = 0.0;
    for (long s = 0; s <= max_sum; ++s) {
      const double c = count[n][s];
      if (c == 0.0) continue;
      total += c;
      if (s <= ra2) le += c;
      if (s >= ra2) ge += c;
    }
    p_less = le / total;
    p_greater = ge / total;
  } else {
    res.method = TestMethod::NormalApprox;
    const double dn = static_cast<double>(n), dm = static_cast<double>(m), dN = static_cast<double>(N);
    double tie_term = 0.0;
    for (auto t : ties) tie_term += std::pow(static_cast<double>(t), 3) - static_cast<double>(t);
    const double var = dn * dm / 12.0 * ((dN + 1.0) - tie_term / (dN * (dN - 1.0)));
    const double mu = dn * dm / 2.0;
    if (var <= 0.0) {
      p_less = p_greater = 1.0;
    } else {
      const double sd = std::sqrt(var);
      p_less = normal_cdf((res.u - mu + 0.5) / sd);
      p_greater = normal_cdf(-(res.u - mu - 0.5) / sd);
    }
  }
  switch (alternative) {
    case Alternative::Less: res.p = p_less; break;
    case Alternative::Greater: res.p = p_greater; break;
    case Alternative::TwoSided: res.p = std::min(1.0, 2.0 * std::min(p_less, p_greater)); break;
  }
  res.p = std::clamp(res.p, 0.0, 1.0);
  return res;
}

double quantile_linear(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorKind::EmptyInput, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

std::vector<double> sorted_finite(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::EmptyInput, "distribution summary of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  for (double x : v)
    if (!std::isfinite(x)) fail(ErrorKind::NonFinite, "non-finite value in distribution sample");
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

DistributionSummary empirical_cdf(std::span<const double> values) {
  const auto v = sorted_finite(values);
  DistributionSummary s;
  s.n = v.size();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i + 1 == v.size() || v[i + 1] != v[i])
      s.cdf.push_back({v[i], static_cast<double>(i + 1) / static_cast<double>(v.size())});
  s.q1 = quantile_linear(v, 0.25);
  s.median = quantile_linear(v, 0.5);
  s.q3 = quantile_linear(v, 0.75);
  return s;
}

DistributionSummary boxplot_stats(std::span<const double> values) {
  auto s = empirical_cdf(values);
  const auto v = sorted_finite(values);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      s.outliers.push_back(x);
      continue;
    }
    s.whisker_low = std::min(s.whisker_low, x);
    s.whisker_high = std::max(s.whisker_high, x);
  }
  return s;
}

TrendEstimate trend_estimate(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 3) fail(ErrorKind::Degenerate, "trend needs at least 3 points, got " + std::to_string(n));
  const double dn = static_cast<double>(n);
  const double xbar = (dn - 1.0) / 2.0;
  double ybar = 0.0;
  for (double y : series) ybar += y;
  ybar /= dn;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    sxx += dx * dx;
    sxy += dx * (series[i] - ybar);
  }
  TrendEstimate t;
  t.slope = sxy / sxx;
  t.intercept = ybar - t.slope * xbar;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = series[i] - (t.intercept + t.slope * static_cast<double>(i));
    ssr += e * e;
  }
  t.std_error = std::sqrt(ssr / (dn - 2.0) / sxx);
  if (t.std_error > 0.0) {
    t.t_stat = t.slope / t.std_error;
    boost::math::students_t dist(dn - 2.0);
    t.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t.t_stat)));
  } else {
    t.t_stat = 0.0;
    t.p_value = t.slope == 0.0 ? 1.0 : 0.0;
  }
  t.significant = t.p_value < 0.05;
  return t;
}

}  // namespace twsbench
