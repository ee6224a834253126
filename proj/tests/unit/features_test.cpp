#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "twsbench/errors.hpp"
#include "twsbench/features.hpp"

using namespace twsbench;

namespace {

std::shared_ptr<const PreparedData> prepared(const std::vector<BasinSeries>& s, SplitSpec split) {
  PrepareOptions po;
  po.split = split;
  return prepare_basins(s, po);
}

std::vector<BasinSeries> world(std::size_t n) { return generate_synthetic(SyntheticConfig::ol_like(n, 42)); }

}  // namespace

TEST(LagWindow, TwelveMonthsGiveFortyEightValues) {
  const auto s = fixtures::make_series("B", 24, [](int c, std::size_t t) { return 100.0 * c + double(t); });
  const auto w = build_lag_window(s, 12, 12);
  ASSERT_EQ(w.size(), 48u);
  // channel-major, oldest first: precip lags t-12..t-1 then temp ...
  EXPECT_EQ(w[0], 0.0);
  EXPECT_EQ(w[11], 11.0);
  EXPECT_EQ(w[12], 100.0);
  EXPECT_EQ(w[47], 311.0);
}

TEST(LagWindow, ExcludesTheTargetStep) {
  const auto s = fixtures::make_series("B", 24, [](int, std::size_t t) { return double(t); });
  const auto w = build_lag_window(s, 20, 5);
  EXPECT_EQ(*std::max_element(w.begin(), w.end()), 19.0);
}

TEST(LagWindow, InsufficientHistory) {
  const auto s = fixtures::noise_series("B", 24, 1);
  try {
    build_lag_window(s, 11, 12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientHistory);
  }
}

TEST(LagWindow, ConstantChannel) {
  const auto s = fixtures::make_series("B", 24, [](int c, std::size_t t) { return c == 1 ? 7.25 : double(t); });
  const auto w = build_lag_window(s, 12, 12);
  for (int k = 12; k < 24; ++k) EXPECT_EQ(w[static_cast<std::size_t>(k)], 7.25);
}

TEST(MonthDummies, JanuaryIsReference) {
  const auto jan = month_dummies(1);
  EXPECT_TRUE(std::all_of(jan.begin(), jan.end(), [](double v) { return v == 0.0; }));
  const auto feb = month_dummies(2);
  EXPECT_EQ(feb[0], 1.0);
  EXPECT_EQ(std::accumulate(feb.begin(), feb.end(), 0.0), 1.0);
  for (unsigned m = 1; m <= 12; ++m) {
    const auto d = month_dummies(m);
    const double sum = std::accumulate(d.begin(), d.end(), 0.0);
    EXPECT_TRUE(sum == 0.0 || sum == 1.0);
    if (m > 1) EXPECT_EQ(d[m - 2], 1.0);
  }
}

TEST(TrendIndex, EpochArithmetic) {
  const Date epoch = make_date(2003, 1, 1);
  EXPECT_EQ(trend_index(epoch, epoch, Resolution::Monthly), 0);
  EXPECT_EQ(trend_index(make_date(2016, 1, 1), epoch, Resolution::Monthly), 156);
  for (int m = 1; m < 12; ++m)
    EXPECT_EQ(trend_index(make_date(2007, unsigned(m + 1), 1), epoch, Resolution::Monthly) -
                  trend_index(make_date(2007, unsigned(m), 1), epoch, Resolution::Monthly),
              1);
}

TEST(SmoothTarget, TrailingMean) {
  std::vector<double> raw(40);
  std::iota(raw.begin(), raw.end(), 1.0);
  const auto sm = smooth_target(raw, 30);
  EXPECT_EQ(sm.first, 29u);
  EXPECT_DOUBLE_EQ(sm.values.front(), 15.5);
  EXPECT_EQ(sm.values.size(), 11u);
  const std::vector<double> flat(50, 3.0);
  for (double v : smooth_target(flat, 30).values) EXPECT_EQ(v, 3.0);
  try {
    smooth_target(raw, 41);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WindowTooLarge);
  }
}

TEST(FeatureNames, DimensionLaw) {
  for (int L : {1, 6, 9, 12, 15, 18}) EXPECT_EQ(flat_feature_names(L).size(), static_cast<std::size_t>(4 * L + 12));
  EXPECT_EQ(flat_feature_names(12).size(), 60u);
  EXPECT_EQ(sequence_channel_names().size(), kSequenceChannels);
}

TEST(FeatureNames, TargetNeverAnInput) {
  for (const auto& n : flat_feature_names(12)) EXPECT_EQ(n.find(kTargetName), std::string::npos);
  for (const auto& n : sequence_channel_names()) EXPECT_EQ(n.find(kTargetName), std::string::npos);
}

TEST(Assemble, PooledTrainingCount) {
  const auto set = assemble_supervised(prepared(world(515), SplitSpec::neural_default()), TaskSpec::regression(12));
  EXPECT_EQ(set.count(Split::Train), 55620u);
  EXPECT_EQ(set.flat_width(), 60u);
}

TEST(Assemble, LinearSplitCountPerBasin) {
  const auto set = assemble_supervised(prepared(world(1), SplitSpec::linear_default()), TaskSpec::regression(12));
  EXPECT_EQ(set.count(Split::Train), 144u);
  EXPECT_EQ(set.count(Split::Test), 60u);
  for (int L : {6, 9, 12, 15, 18}) {
    const auto s = assemble_supervised(prepared(world(1), SplitSpec::linear_default()), TaskSpec::regression(L));
    EXPECT_EQ(s.count(Split::Train), static_cast<std::size_t>(156 - L));
  }
}

TEST(Assemble, DailyStrideOneCount) {
  auto cfg = SyntheticConfig::ol_like(1, 3);
  cfg.resolution = Resolution::Daily;
  cfg.length = static_cast<std::size_t>(steps_between(make_date(2003, 1, 1), make_date(2021, 1, 1), Resolution::Daily));
  const auto data = prepared(generate_synthetic(cfg), SplitSpec::neural_default());
  const auto set = assemble_supervised(data, TaskSpec::daily_smoothed(365, 30, 1));
  EXPECT_EQ(set.count(Split::Train), 3653u - 365u);
  const auto strided = assemble_supervised(data, TaskSpec::daily_smoothed(365, 30, 5));
  EXPECT_EQ(strided.count(Split::Train), (3288u + 4u) / 5u);
}

TEST(Assemble, DailyTaskOnMonthlyDataIsResolutionMismatch) {
  try {
    assemble_supervised(prepared(world(1), SplitSpec::neural_default()), TaskSpec::daily_smoothed());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResolutionMismatch);
  }
}

TEST(Assemble, ForecastLastWindowStopsHBeforeSplitEnd) {
  const auto set = assemble_supervised(prepared(world(1), SplitSpec::linear_default()), TaskSpec::forecast(12, 6));
  std::uint32_t last = 0;
  for (const auto& e : set.examples(Split::Test)) last = std::max(last, e.t);
  EXPECT_EQ(last, 216u - 6u);
  EXPECT_EQ(set.count(Split::Test), 60u - 5u);
  for (const auto& e : set.examples()) EXPECT_EQ(set.targets(e).size(), 6);
}

TEST(Assemble, TargetsNeverStraddleSplits) {
  const auto set = assemble_supervised(prepared(world(2), SplitSpec::neural_default()), TaskSpec::forecast(12, 6));
  const auto& data = set.data();
  for (const auto& e : set.examples()) {
    const auto& b = data.basins[e.basin];
    for (std::size_t h = 0; h < 6; ++h) EXPECT_EQ(b.split[e.t + h], e.split);
  }
  EXPECT_NO_THROW(check_leakage(set));
}

TEST(Assemble, InputsStrictlyBeforeTargetsAndNeverFromLaterSplits) {
  const auto set = assemble_supervised(prepared(world(2), SplitSpec::neural_default()), TaskSpec::regression(12));
  const auto rank = [](Split s) { return s == Split::Train ? 0 : s == Split::Validation ? 1 : 2; };
  for (const auto& e : set.examples()) {
    const auto& b = set.data().basins[e.basin];
    for (std::size_t i = e.t - 12; i < e.t; ++i) {
      ASSERT_TRUE(b.split[i].has_value());
      EXPECT_LE(rank(*b.split[i]), rank(e.split));
    }
  }
}

TEST(Assemble, RepresentationEquivalence) {
  const auto set = assemble_supervised(prepared(world(2), SplitSpec::linear_default()), TaskSpec::regression(12));
  for (const auto& e : set.examples()) {
    const auto ex = set.materialize(e);
    const auto& seq = ex.sequence_features;
    Eigen::VectorXd rebuilt(60);
    Eigen::Index i = 0;
    for (Eigen::Index c = 0; c < 4; ++c)
      for (Eigen::Index k = 0; k < 12; ++k) rebuilt[i++] = seq(k, c);
    const auto& b = set.data().basins[e.basin];
    for (double d : month_dummies(b.month[e.t])) rebuilt[i++] = d;
    rebuilt[i++] = b.trend[e.t];
    ASSERT_TRUE(rebuilt == ex.flat_features) << e.t;
    EXPECT_EQ(ex.time_index, trend_index(b.axis.date_at(e.t), set.data().epoch, Resolution::Monthly));
  }
}

TEST(Assemble, ExampleOrderIsBasinThenTime) {
  const auto set = assemble_supervised(prepared(world(3), SplitSpec::neural_default()), TaskSpec::regression(12));
  const auto& ex = set.examples();
  for (std::size_t i = 1; i < ex.size(); ++i)
    EXPECT_TRUE(ex[i - 1].basin < ex[i].basin || (ex[i - 1].basin == ex[i].basin && ex[i - 1].t < ex[i].t));
}

TEST(Assemble, ManifestRecordsCounts) {
  const auto set = assemble_supervised(prepared(world(2), SplitSpec::linear_default()), TaskSpec::regression(12));
  const auto m = set.manifest_json();
  EXPECT_NE(m.find("\"train\": 288"), std::string::npos) << m.substr(0, 400);
  EXPECT_NE(m.find("precip_lag12"), std::string::npos);
}

TEST(Prepare, StaticsStandardizedAcrossBasins) {
  const auto data = prepared(world(6), SplitSpec::linear_default());
  for (Eigen::Index f = 0; f < 11; ++f) {
    double m = 0.0;
    for (const auto& b : data->basins) m += b.statics[f];
    EXPECT_NEAR(m / 6.0, 0.0, 1e-10);
  }
}

TEST(Prepare, EpochIsFirstPooledTimestamp) {
  const auto data = prepared(world(2), SplitSpec::linear_default());
  EXPECT_EQ(data->epoch, make_date(2003, 1, 1));
  EXPECT_EQ(data->basins[0].time_index[156], 156);
}
