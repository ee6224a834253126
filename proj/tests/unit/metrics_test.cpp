#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "twsbench/errors.hpp"
#include "twsbench/metrics.hpp"

using namespace twsbench;

namespace {

MetricSet m(const std::vector<double>& t, const std::vector<double>& p) { return compute_metrics(t, p); }

void expect_close(double a, double b, double tol = 1e-12) { EXPECT_LE(std::abs(a - b), tol * std::max(1.0, std::abs(b))); }

}  // namespace

TEST(Metrics, PerfectPrediction) {
  const std::vector<double> t{3.0, 1.0, 4.0, 1.0, 5.0};
  const auto r = m(t, t);
  EXPECT_EQ(r.bias, 0.0);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_DOUBLE_EQ(*r.corr, 1.0);
  EXPECT_EQ(*r.nse, 1.0);
  EXPECT_DOUBLE_EQ(*r.kge, 1.0);
}

TEST(Metrics, MeanPredictorHasZeroNseAndUndefinedCorrelation) {
  const std::vector<double> t{2.0, 4.0, 9.0, 1.0};
  const std::vector<double> p(4, 4.0);
  const auto r = m(t, p);
  EXPECT_EQ(*r.nse, 0.0);
  EXPECT_FALSE(r.corr);
  EXPECT_FALSE(r.kge);
}

TEST(Metrics, HandComputedExample) {
  const auto r = m({1, 2, 3, 4}, {2, 2, 4, 4});
  EXPECT_DOUBLE_EQ(r.bias, 0.5);
  EXPECT_NEAR(r.rmse, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(*r.nse, 0.6, 1e-15);
  const double corr = 1.0 / std::sqrt(1.25);
  EXPECT_NEAR(*r.corr, corr, 1e-15);
  const double alpha = 1.0 / std::sqrt(1.25), beta = 3.0 / 2.5;
  EXPECT_NEAR(*r.kge, 1.0 - std::sqrt(std::pow(corr - 1, 2) + std::pow(alpha - 1, 2) + std::pow(beta - 1, 2)), 1e-15);
}

TEST(Metrics, AgreesWithDefinitionOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(2, 80);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    auto t = oracle::random_vector(n, rng, -50.0, 150.0);
    auto p = oracle::random_vector(n, rng, -50.0, 150.0);
    const auto got = m(t, p);
    const auto ref = oracle::metrics(t, p);
    expect_close(got.bias, ref.bias);
    expect_close(got.rmse, ref.rmse);
    ASSERT_EQ(got.corr.has_value(), ref.r.has_value());
    if (ref.r) expect_close(*got.corr, *ref.r);
    ASSERT_EQ(got.nse.has_value(), ref.nse.has_value());
    if (ref.nse) expect_close(*got.nse, *ref.nse);
    ASSERT_EQ(got.kge.has_value(), ref.kge.has_value());
    if (ref.kge) expect_close(*got.kge, *ref.kge);
  }
}

TEST(Metrics, UndefinedCases) {
  const auto flat = m({2, 2, 2}, {1, 2, 3});
  EXPECT_FALSE(flat.nse);
  EXPECT_FALSE(flat.corr);
  EXPECT_FALSE(flat.kge);
  // zero-mean truth: beta would explode
  const auto centred = m({-1, 1, -2, 2}, {-1, 1.5, -2, 2});
  EXPECT_TRUE(centred.nse);
  EXPECT_TRUE(centred.corr);
  EXPECT_FALSE(centred.kge);
}

TEST(Metrics, ErrorKinds) {
  auto kind = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind([] { m({1, 2}, {1}); }), ErrorKind::ShapeMismatch);
  EXPECT_EQ(kind([] { m({}, {}); }), ErrorKind::EmptyInput);
  EXPECT_EQ(kind([] { m({1, NAN}, {1, 2}); }), ErrorKind::NonFinite);
}

TEST(MetricProperties, BoundsAndNseDecomposition) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    auto t = oracle::random_vector(30, rng, 10.0, 20.0);
    auto p = oracle::random_vector(30, rng, 5.0, 25.0);
    const auto r = m(t, p);
    EXPECT_LE(*r.nse, 1.0);
    EXPECT_LE(*r.kge, 1.0);
    EXPECT_GE(*r.corr, -1.0);
    EXPECT_LE(*r.corr, 1.0);
    EXPECT_EQ(*r.nse < 0.0, r.rmse > oracle::pop_sd(t));
  }
}

TEST(MetricProperties, ScaleBehaviour) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = oracle::random_vector(25, rng, 10.0, 20.0);
    auto p = oracle::random_vector(25, rng, 8.0, 22.0);
    const double a = 0.1 + 5.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const double b = std::uniform_real_distribution<double>(-30, 30)(rng);
    std::vector<double> ts(t), ps(p), ta(t), pa(p);
    for (std::size_t i = 0; i < t.size(); ++i) {
      ts[i] *= a;
      ps[i] *= a;
      ta[i] = a * t[i] + b;
      pa[i] = a * p[i] + b;
    }
    const auto base = m(t, p), scaled = m(ts, ps), affine = m(ta, pa);
    EXPECT_NEAR(scaled.bias, a * base.bias, 1e-10 * a * (1 + std::abs(base.bias)));
    EXPECT_NEAR(scaled.rmse, a * base.rmse, 1e-10 * a * base.rmse);
    EXPECT_NEAR(*affine.corr, *base.corr, 1e-10);
    EXPECT_NEAR(*affine.nse, *base.nse, 1e-10);
    EXPECT_NEAR(*scaled.kge, *base.kge, 1e-10);
  }
}

TEST(MetricSet, NamedAccess) {
  const auto r = m({1, 2, 3, 4}, {2, 2, 4, 4});
  EXPECT_EQ(*r.get("bias"), 0.5);
  EXPECT_EQ(*r.get("abs_bias"), 0.5);
  EXPECT_EQ(r.get("nse"), r.nse);
  EXPECT_TRUE(higher_is_better("nse"));
  EXPECT_FALSE(higher_is_better("rmse"));
  EXPECT_TRUE(is_known_metric("kge"));
  EXPECT_FALSE(is_known_metric("mape"));
  EXPECT_EQ(metric_names().size(), 5u);
}
