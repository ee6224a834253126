#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "twsbench/errors.hpp"

using namespace twsbench;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Io;
}

const std::string kDynHeader = "basin_id,date,precip,temp,lai,ssmc,tws\n";
const std::string kStatHeader =
    "basin_id,elev,slope,sand,silt,clay,forest,crop,area,clim_precip,clim_temp,clim_lai\n";
const std::string kStatRow = "B1,1,2,3,4,5,6,7,8,9,10,11\n";

}  // namespace

TEST(Calendar, ParsesStrictIsoDates) {
  EXPECT_TRUE(parse_date("2003-01-01"));
  EXPECT_FALSE(parse_date("2003-1-01"));
  EXPECT_FALSE(parse_date("2003-02-30"));
  EXPECT_FALSE(parse_date("20030101"));
  EXPECT_EQ(format_date(*parse_date("2016-12-31")), "2016-12-31");
}

TEST(Calendar, StepArithmetic) {
  const Date a = make_date(2003, 1, 1);
  EXPECT_EQ(steps_between(a, make_date(2016, 1, 1), Resolution::Monthly), 156);
  EXPECT_EQ(steps_between(a, make_date(2013, 1, 1), Resolution::Daily), 3653);
  EXPECT_EQ(advance(a, 216, Resolution::Monthly), make_date(2021, 1, 1));
  EXPECT_EQ(advance(make_date(2004, 2, 28), 1, Resolution::Daily), make_date(2004, 2, 29));
}

TEST(Calendar, AxisIndexing) {
  TimeAxis ax(make_date(2003, 1, 1), Resolution::Monthly, 216);
  EXPECT_EQ(ax.end(), make_date(2020, 12, 1));
  EXPECT_EQ(ax.index_of(make_date(2016, 1, 1)), 156u);
  EXPECT_FALSE(ax.index_of(make_date(2016, 1, 2)));
  EXPECT_FALSE(ax.index_of(make_date(2021, 1, 1)));
  EXPECT_EQ(ax.lower_bound(make_date(2002, 6, 1)), 0u);
  EXPECT_EQ(ax.lower_bound(make_date(2030, 1, 1)), 216u);
}

TEST(Dataset, LinearSplitOnMonthlyRecord) {
  const auto s = fixtures::noise_series("B1", 216, 1);
  const auto v = split_series(s, SplitSpec::linear_default());
  EXPECT_EQ(v.train.size, 156u);
  EXPECT_FALSE(v.validation);
  EXPECT_EQ(v.test.size, 60u);
  EXPECT_EQ(v.train.size + v.test.size, s.length());
}

TEST(Dataset, NeuralSplitOnMonthlyRecord) {
  const auto s = fixtures::noise_series("B1", 216, 1);
  const auto v = split_series(s, SplitSpec::neural_default());
  EXPECT_EQ(v.train.size, 120u);
  ASSERT_TRUE(v.validation);
  EXPECT_EQ(v.validation->size, 36u);
  EXPECT_EQ(v.test.size, 60u);
  // contiguous partition
  EXPECT_EQ(v.train.begin + v.train.size, v.validation->begin);
  EXPECT_EQ(v.validation->begin + v.validation->size, v.test.begin);
}

TEST(Dataset, SplitBeyondAxisIsOutOfRange) {
  const auto s = fixtures::noise_series("B1", 216, 1);
  SplitSpec spec = SplitSpec::linear_default();
  spec.test.end = make_date(2021, 12, 1);
  EXPECT_EQ(kind_of([&] { split_series(s, spec); }), ErrorKind::OutOfRange);
}

TEST(Dataset, OverlappingSplitsRejected) {
  SplitSpec spec = SplitSpec::linear_default();
  spec.test.start = make_date(2015, 6, 1);
  EXPECT_EQ(kind_of([&] { spec.validate(); }), ErrorKind::InvalidConfig);
}

TEST(Scaler, TrainingViewStandardizes) {
  const auto s = fixtures::noise_series("B1", 216, 3);
  const auto v = split_series(s, SplitSpec::linear_default());
  const Scaler sc = fit_scaler(v.train);
  const Eigen::MatrixXd z = sc.transform(v.train.channels());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double m = z.col(c).mean();
    const double sd = std::sqrt((z.col(c).array() - m).square().mean());
    EXPECT_NEAR(m, 0.0, 1e-10);
    EXPECT_NEAR(sd, 1.0, 1e-10);
  }
}

TEST(Scaler, RoundTripIsIdentity) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(10.0, 50.0);
  Eigen::MatrixXd X(40, 5);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = n(rng);
  const Scaler sc = Scaler::fit(X);
  const Eigen::MatrixXd back = sc.inverse(sc.transform(X));
  for (Eigen::Index i = 0; i < X.size(); ++i)
    EXPECT_LE(std::abs(back.data()[i] - X.data()[i]), 1e-12 * std::max(1.0, std::abs(X.data()[i])));
}

TEST(Scaler, ConstantChannelIsFlooredToZero) {
  const auto s = fixtures::make_series("B1", 216, [](int c, std::size_t t) { return c == 2 ? 3.5 : double(t % 7); });
  const Scaler sc = fit_scaler(split_series(s, SplitSpec::linear_default()).train);
  EXPECT_GE(sc.std()[2], Scaler::kStdFloor);
  EXPECT_EQ(sc.transform(3.5, 2), 0.0);
}

TEST(Scaler, TrendedTestMeanOffsetMatchesTrendTimesGap) {
  // x_t = t: train mean is 77.5 over 0..155, test mean is 185.5 over 156..215.
  const auto s = fixtures::make_series("B1", 216, [](int, std::size_t t) { return double(t); });
  const auto v = split_series(s, SplitSpec::linear_default());
  const Scaler sc = fit_scaler(v.train);
  const double test_mean = sc.transform(v.test.channels()).col(0).mean();
  const double sd_train = std::sqrt((156.0 * 156.0 - 1.0) / 12.0);
  EXPECT_NEAR(test_mean, (185.5 - 77.5) / sd_train, 1e-10);
}

TEST(Scaler, FitDependsOnlyOnTrainingRows) {
  auto a = fixtures::noise_series("B1", 216, 9);
  auto b = a;
  for (Eigen::Index t = 160; t < 216; ++t) b.dynamic.row(t).setConstant(1e6);
  const auto sa = fit_scaler(split_series(a, SplitSpec::linear_default()).train);
  const auto sb = fit_scaler(split_series(b, SplitSpec::linear_default()).train);
  EXPECT_EQ(sa.mean(), sb.mean());
  EXPECT_EQ(sa.std(), sb.std());
}

TEST(Scaler, NeedsTwoRows) {
  EXPECT_EQ(kind_of([] { Scaler::fit(Eigen::MatrixXd::Ones(1, 3)); }), ErrorKind::Degenerate);
}

class CsvTest : public ::testing::Test {
 protected:
  void SetUp() override { dir = fixtures::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name()); }
  std::string path(const char* leaf) const { return (dir / leaf).string(); }
  std::filesystem::path dir;
};

TEST_F(CsvTest, RoundTripIsBitIdentical) {
  const auto series = generate_synthetic(fixtures::small_world(3, 11));
  write_basin_series(series, path("d.csv"), path("s.csv"));
  const auto back = load_basin_series(path("d.csv"), path("s.csv"));
  ASSERT_EQ(back.size(), series.size());
  for (std::size_t b = 0; b < series.size(); ++b) {
    EXPECT_EQ(back[b].basin_id, series[b].basin_id);
    EXPECT_EQ(back[b].axis, series[b].axis);
    EXPECT_TRUE(back[b].dynamic == series[b].dynamic);
    EXPECT_TRUE(back[b].target == series[b].target);
    EXPECT_EQ(back[b].statics, series[b].statics);
  }
}

TEST_F(CsvTest, MonthlyRecordLoadsTo216Steps) {
  std::string dyn = kDynHeader;
  for (int y = 2003; y <= 2020; ++y)
    for (int m = 1; m <= 12; ++m) dyn += "B1," + format_date(make_date(y, m, 1)) + ",1,2,3,4,5\n";
  fixtures::write_text(dir / "d.csv", dyn);
  fixtures::write_text(dir / "s.csv", kStatHeader + kStatRow);
  const auto s = load_basin_series(path("d.csv"), path("s.csv"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].length(), 216u);
  EXPECT_EQ(s[0].axis.resolution(), Resolution::Monthly);
}

TEST_F(CsvTest, EmptyDynamicFileIsSchemaError) {
  fixtures::write_text(dir / "d.csv", "");
  fixtures::write_text(dir / "s.csv", kStatHeader + kStatRow);
  EXPECT_EQ(kind_of([&] { load_basin_series(path("d.csv"), path("s.csv")); }), ErrorKind::Schema);
}

TEST_F(CsvTest, NanNamesBasinDateAndColumn) {
  fixtures::write_text(dir / "d.csv", kDynHeader + "B1,2003-01-01,1,2,3,4,5\nB1,2003-02-01,1,2,3,NaN,5\nB1,2003-03-01,1,2,3,4,5\n");
  fixtures::write_text(dir / "s.csv", kStatHeader + kStatRow);
  try {
    load_basin_series(path("d.csv"), path("s.csv"));
    FAIL() << "expected missing-value error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingValue);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("B1"), std::string::npos);
    EXPECT_NE(msg.find("2003-02-01"), std::string::npos);
    EXPECT_NE(msg.find("ssmc"), std::string::npos);
  }
}

TEST_F(CsvTest, GapOrphanAndSchemaViolationsAreCollected) {
  fixtures::write_text(dir / "d.csv", kDynHeader +
                                          "B1,2003-01-01,1,2,3,4,5\nB1,2003-03-01,1,2,3,4,5\n"
                                          "B2,2003-01-01,1,2,3,4,5\nB2,2003-02-01,1,2,3,4,5\n");
  fixtures::write_text(dir / "s.csv", kStatHeader + kStatRow);
  const auto v = validate_dataset_files(path("d.csv"), path("s.csv"));
  bool gap = false, orphan = false;
  for (const auto& x : v) {
    gap |= x.kind == "gap";
    orphan |= x.kind == "orphan-basin";
  }
  EXPECT_TRUE(gap);
  EXPECT_TRUE(orphan);
  EXPECT_EQ(kind_of([&] { load_basin_series(path("d.csv"), path("s.csv")); }), ErrorKind::Gap);

  fixtures::write_text(dir / "bad.csv", "basin_id,date,precip\nB1,2003-01-01,1\n");
  const auto w = validate_dataset_files(path("bad.csv"), path("s.csv"));
  ASSERT_FALSE(w.empty());
  EXPECT_EQ(w.front().kind, "schema");
}

TEST_F(CsvTest, CleanSyntheticOutputValidates) {
  write_basin_series(generate_synthetic(fixtures::small_world(2, 1)), path("d.csv"), path("s.csv"));
  EXPECT_TRUE(validate_dataset_files(path("d.csv"), path("s.csv")).empty());
}

TEST(BasinSeries, ValidateRejectsNonFinite) {
  auto s = fixtures::noise_series("B1", 24, 1);
  s.target[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::MissingValue);
}
