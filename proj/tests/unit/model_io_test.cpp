#include <gtest/gtest.h>

#include <random>

#include "twsbench/errors.hpp"
#include "twsbench/features.hpp"
#include "twsbench/model_io.hpp"

using namespace twsbench;

namespace {

Eigen::MatrixXd rand_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd X(r, c);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = n01(rng);
  return X;
}

}  // namespace

TEST(ModelIo, LinearRoundTripIsBitIdentical) {
  const Eigen::MatrixXd X = rand_matrix(100, 60, 1);
  const Eigen::VectorXd y = rand_matrix(100, 1, 2).col(0);
  LinearModel m = fit_ols(X, y);
  m.feature_names = flat_feature_names(12);
  m.fitted_on = "B0001";
  const std::string text = linear_model_to_json(m);
  EXPECT_NE(text.find("\"precip_lag12\""), std::string::npos);
  const auto back = linear_model_from_json(text);
  EXPECT_EQ(back.feature_names, m.feature_names);
  EXPECT_TRUE(back.predict(X) == m.predict(X));
  EXPECT_EQ(back.fitted_on, "B0001");
}

TEST(ModelIo, LinearNeedsMatchingNames) {
  LinearModel m;
  m.weights = Eigen::VectorXd::Ones(3);
  m.feature_names = {"a"};
  EXPECT_THROW(linear_model_to_json(m), Error);
}

TEST(ModelIo, TreeUsesNestedNodes) {
  const Eigen::MatrixXd X = rand_matrix(80, 3, 3);
  const Eigen::VectorXd y = rand_matrix(80, 1, 4).col(0);
  const auto t = fit_tree(X, y, {});
  const std::string text = tree_to_json(t);
  EXPECT_NE(text.find("\"left\""), std::string::npos);
  const auto back = tree_from_json(text);
  EXPECT_TRUE(back == t);
}

TEST(ModelIo, ForestAndBoostedRoundTrip) {
  const Eigen::MatrixXd X = rand_matrix(150, 4, 5);
  const Eigen::VectorXd y = rand_matrix(150, 1, 6).col(0);
  ForestParams fp;
  fp.n_estimators = 5;
  fp.tree.max_depth = 4;
  const auto f = fit_forest(X, y, fp, 7);
  EXPECT_TRUE(forest_from_json(forest_to_json(f)).predict(X) == f.predict(X));
  BoostParams bp;
  bp.n_estimators = 8;
  bp.min_child_samples = 5;
  const auto b = fit_boosted(X, y, bp, 0);
  const auto bb = boosted_from_json(boosted_to_json(b));
  EXPECT_TRUE(bb.predict(X) == b.predict(X));
  EXPECT_EQ(bb.params.num_leaves, b.params.num_leaves);
}

TEST(ModelIo, MalformedInputIsSchemaError) {
  try {
    tree_from_json("{\"value\": 1.0}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Schema);
  }
  EXPECT_THROW(linear_model_from_json("not json"), Error);
}
