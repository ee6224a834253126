#include <gtest/gtest.h>

#include <atomic>

#include <json.hpp>

#include "fixtures.hpp"
#include "twsbench/errors.hpp"
#include "twsbench/harness.hpp"

using namespace twsbench;

namespace {

ExperimentConfig linear_config(const std::string& extra = "") {
  std::string text = R"({"models": ["Linear_single", "Linear_glob"], "data": {"synthetic": {"n_basins": 4}})";
  if (!extra.empty()) text += ", " + extra;
  return experiment_config_from_json(text + "}");
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST(ParallelFor, EveryIndexOnceAndLowestErrorWins) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    parallel_for(20, 3, [](std::size_t i) {
      if (i == 7 || i == 12) fail(ErrorKind::Degenerate, "job " + std::to_string(i));
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).find("job 7") != std::string::npos, true);
  }
}

TEST(Harness, LeadOneOfForecastEqualsRegression) {
  const auto cfg = linear_config();
  const auto series = load_experiment_data(cfg);
  const auto reg = run_models(cfg, series, TaskSpec::regression(12), {"Linear_single", "Linear_glob"});
  const auto fc = run_models(cfg, series, TaskSpec::forecast(12, 3), {"Linear_single", "Linear_glob"});
  ASSERT_EQ(fc.predictions.size(), 3u);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t b = 0; b < series.size(); ++b) {
      EXPECT_EQ(fc.predictions[0][m][b].pred, reg.predictions[0][m][b].pred);
      EXPECT_EQ(fc.predictions[0][m][b].dates, reg.predictions[0][m][b].dates);
    }
}

TEST(Harness, ReportContents) {
  const auto res = run_experiment(linear_config());
  const auto& rep = res.report;
  for (const char* f : {"manifest.json", "metrics.csv", "rankings.csv", "significance.csv", "coefficients.csv"})
    EXPECT_TRUE(rep.has(f)) << f;
  const auto man = nlohmann::json::parse(rep.at("manifest.json"));
  EXPECT_EQ(man["seed"], 42);
  EXPECT_EQ(man["data"]["n_basins"], 4);
  EXPECT_EQ(man["input_hash"].get<std::string>().rfind("fnv1a64:", 0), 0u);
  EXPECT_FALSE(man["config"].contains("workers"));
  EXPECT_EQ(man["files"].size(), rep.files.size());
  const auto& fm = man["feature_manifests"]["main"][0];
  EXPECT_EQ(fm["counts"]["train"], 4 * 144);
  EXPECT_EQ(res.summaries.size(), 2u);
  EXPECT_TRUE(res.summaries[0].median_nse.has_value());
}

TEST(Harness, SingleModelHasNoComparisons) {
  auto cfg = linear_config();
  cfg.models = {"Linear_single"};
  const auto rep = run_experiment(cfg).report;
  EXPECT_FALSE(rep.has("significance.csv"));
  EXPECT_FALSE(rep.has("rankings.csv"));
  EXPECT_TRUE(rep.has("metrics.csv"));
}

TEST(Harness, WorkerCountDoesNotChangeResults) {
  auto a = linear_config();
  auto b = a;
  b.workers = 3;
  const auto ra = run_experiment(a).report, rb = run_experiment(b).report;
  EXPECT_EQ(ra.files, rb.files);
}

TEST(Harness, ResolutionAndHorizonChecks) {
  auto daily = linear_config(R"("experiment": "daily_smoothed")");
  EXPECT_EQ(kind_of([&] { run_experiment(daily); }), ErrorKind::ResolutionMismatch);
  auto fc = linear_config(R"("experiment": "forecast_sweep", "horizon": 61)");
  EXPECT_EQ(kind_of([&] { run_experiment(fc); }), ErrorKind::HorizonExceedsSplit);
}

TEST(Report, WriteReadRoundTrip) {
  const auto dir = fixtures::scratch_dir("report") / "out";
  Report r;
  r.add("a.csv", "x\n1\n");
  r.add("sub/b.txt", "hello");
  write_report(r, dir);
  EXPECT_EQ(read_report(dir).files, r.files);
  Report r2;
  r2.add("c.csv", "y\n");
  write_report(r2, dir);
  EXPECT_EQ(read_report(dir).files, r2.files);
  EXPECT_EQ(kind_of([&] { read_report(dir / "missing"); }), ErrorKind::MissingReport);
}

TEST(Harness, TrendClassOnTrendedWorld) {
  auto cfg = SyntheticConfig::da_like(8, 3);
  const auto series = generate_synthetic(cfg);
  std::size_t negative = 0;
  for (std::size_t b = 0; b < series.size(); ++b)
    if (trend_class(series[b]) == "negative") ++negative;
  EXPECT_GE(negative, 3u);
  EXPECT_LE(negative, 5u);
}
