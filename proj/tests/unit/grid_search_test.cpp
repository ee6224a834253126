#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "twsbench/errors.hpp"
#include "twsbench/grid_search.hpp"

using namespace twsbench;

namespace {

// y is a binary code of five thresholded features: an exact fit needs depth 5.
void depth_five_world(Eigen::MatrixXd& X, Eigen::VectorXd& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  X.resize(400, 5);
  y.resize(400);
  for (Eigen::Index i = 0; i < 400; ++i) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < 5; ++j) {
      X(i, j) = u(rng);
      v += std::ldexp(X(i, j) > 0.5 ? 1.0 : 0.0, int(4 - j));
    }
    y[i] = v;
  }
}

}  // namespace

TEST(GridSpec, DefaultGridSizes) {
  EXPECT_EQ(GridSearchSpec::random_forest_default().candidate_count(), 81u);
  EXPECT_EQ(GridSearchSpec::random_forest_default().candidates().size(), 81u);
  EXPECT_EQ(GridSearchSpec::boosted_default().candidate_count(), 324u);
  EXPECT_EQ(GridSearchSpec::boosted_default().candidates().size(), 324u);
}

TEST(GridSpec, FirstAxisVariesSlowest) {
  GridSearchSpec s;
  s.axes = {{"a", {1.0, 2.0}}, {"b", {10.0, 20.0, 30.0}}};
  const auto c = s.candidates();
  ASSERT_EQ(c.size(), 6u);
  EXPECT_EQ(c[0], (std::vector<ParamValue>{1.0, 10.0}));
  EXPECT_EQ(c[1], (std::vector<ParamValue>{1.0, 20.0}));
  EXPECT_EQ(c[3], (std::vector<ParamValue>{2.0, 10.0}));
}

TEST(GridSpec, EmptyAxisRejected) {
  GridSearchSpec s;
  s.axes = {{"n_estimators", {}}};
  EXPECT_THROW(s.validate(), Error);
}

TEST(GridSearch, EvaluatesEveryDefaultCandidate) {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  depth_five_world(X, y, 1);
  X.conservativeResize(60, Eigen::NoChange);
  y.conservativeResize(60);
  const auto rf = grid_search(TreeFamily::RandomForest, GridSearchSpec::random_forest_default(), X, y, 3);
  EXPECT_EQ(rf.evaluated.size(), 81u);
  const auto gb = grid_search(TreeFamily::Boosted, GridSearchSpec::boosted_default(), X, y, 3);
  EXPECT_EQ(gb.evaluated.size(), 324u);
}

TEST(GridSearch, SingleCandidateIsSelected) {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  depth_five_world(X, y, 2);
  GridSearchSpec s;
  s.axes = {{"n_estimators", {5.0}}, {"max_depth", {3.0}}};
  const auto r = grid_search(TreeFamily::RandomForest, s, X, y, 1);
  EXPECT_EQ(r.best_index, 0u);
  ASSERT_TRUE(std::holds_alternative<ForestModel>(r.model));
  EXPECT_EQ(std::get<ForestModel>(r.model).trees.size(), 5u);
}

TEST(GridSearch, DepthFiveDominatesAndScoresMatchExhaustiveRefits) {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  depth_five_world(X, y, 3);
  GridSearchSpec s;
  s.axes = {{"n_estimators", {3.0}}, {"max_depth", {1.0, 2.0, 5.0}}, {"min_samples_leaf", {1.0}}};
  const auto r = grid_search(TreeFamily::RandomForest, s, X, y, 11);
  EXPECT_EQ(r.evaluated[r.best_index].values[1], ParamValue(5.0));

  // independent scoring of every candidate on the chronological tail
  const Eigen::Index n_hold = 80, n_fit = 320;
  std::size_t argmin = 0;
  double best = INFINITY;
  for (std::size_t i = 0; i < r.evaluated.size(); ++i) {
    const auto p = forest_params_from(r.names, r.evaluated[i].values);
    const auto m = fit_forest(X.topRows(n_fit), y.head(n_fit), p, 11);
    const double mae = (m.predict(X.bottomRows(n_hold)) - y.tail(n_hold)).cwiseAbs().mean();
    EXPECT_NEAR(mae, r.evaluated[i].holdout_mae, 1e-12);
    if (mae < best) {
      best = mae;
      argmin = i;
    }
  }
  EXPECT_EQ(argmin, r.best_index);
}

TEST(GridSearch, TiesKeepEarlierCandidate) {
  // a constant target makes every candidate perfect
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(40, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(40, 2.0);
  GridSearchSpec s;
  s.axes = {{"n_estimators", {10.0, 50.0}}, {"max_depth", {3.0, 5.0}}};
  const auto r = grid_search(TreeFamily::Boosted, s, X, y, 0);
  EXPECT_EQ(r.best_index, 0u);
}

TEST(GridSearch, WinnerRefitOnAllRows) {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  depth_five_world(X, y, 4);
  GridSearchSpec s;
  s.axes = {{"n_estimators", {4.0}}, {"max_depth", {5.0}}};
  const auto r = grid_search(TreeFamily::RandomForest, s, X, y, 9);
  const auto direct = fit_forest(X, y, forest_params_from(r.names, r.evaluated[0].values), 9);
  EXPECT_TRUE(r.predict(X) == direct.predict(X));
}

TEST(GridSearch, NeedsTenRows) {
  GridSearchSpec s;
  s.axes = {{"n_estimators", {2.0}}};
  EXPECT_THROW(grid_search(TreeFamily::RandomForest, s, Eigen::MatrixXd::Random(9, 2), Eigen::VectorXd::Random(9), 0),
               Error);
}
