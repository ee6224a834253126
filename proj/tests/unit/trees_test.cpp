#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "twsbench/errors.hpp"
#include "twsbench/trees.hpp"

using namespace twsbench;

namespace {

struct Data {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Data tree_data(Eigen::Index n, Eigen::Index f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n01;
  Data d{Eigen::MatrixXd(n, f), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) d.X(i, j) = u(rng);
    d.y[i] = 3.0 * (d.X(i, 0) > 0.4) - 2.0 * d.X(i, f - 1) + 0.2 * n01(rng);
  }
  return d;
}

double mse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).squaredNorm() / double(a.size()); }

// Every node's value is the mean of the training rows routed to it, and children are nonempty.
void check_tree_invariants(const RegressionTree& t, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto& nodes = t.nodes();
  std::vector<std::vector<Eigen::Index>> members(nodes.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    int k = 0;
    members[0].push_back(i);
    while (!nodes[static_cast<std::size_t>(k)].is_leaf()) {
      const auto& n = nodes[static_cast<std::size_t>(k)];
      k = X(i, n.feature) <= n.threshold ? n.left : n.right;
      members[static_cast<std::size_t>(k)].push_back(i);
    }
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    ASSERT_FALSE(members[k].empty());
    EXPECT_EQ(members[k].size(), nodes[k].n);
    if (nodes[k].is_leaf()) {
      double s = 0.0;
      for (auto i : members[k]) s += y[i];
      EXPECT_NEAR(nodes[k].value, s / double(members[k].size()), 1e-12);
    }
  }
}

}  // namespace

TEST(Tree, ConstantTargetIsOneLeaf) {
  const auto d = tree_data(30, 3, 1);
  const auto t = fit_tree(d.X, Eigen::VectorXd::Constant(30, 4.5), {});
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.nodes()[0].value, 4.5);
}

TEST(Tree, DepthZeroIsTheMean) {
  const auto d = tree_data(30, 3, 2);
  TreeParams p;
  p.max_depth = 0;
  const auto t = fit_tree(d.X, d.y, p);
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_NEAR(t.nodes()[0].value, d.y.mean(), 1e-12);
}

TEST(Tree, StepFunctionMatchesBruteForceSplit) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd X(50, 1);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    X(i, 0) = u(rng);
    y[i] = X(i, 0) > 0.5 ? 1.0 : 0.0;
  }
  TreeParams p;
  p.max_depth = 1;
  const auto t = fit_tree(X, y, p);
  const auto ref = oracle::best_split(X, y);
  ASSERT_EQ(t.nodes().size(), 3u);
  EXPECT_EQ(t.nodes()[0].feature, ref.feature);
  EXPECT_DOUBLE_EQ(t.nodes()[0].threshold, ref.threshold);
  EXPECT_GT(t.nodes()[0].threshold, 0.4);
  EXPECT_LT(t.nodes()[0].threshold, 0.6);
  EXPECT_TRUE(t.predict(X) == y);
}

TEST(Tree, RootSplitMatchesOracleOnRandomData) {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto d = tree_data(40, 4, seed);
    TreeParams p;
    p.max_depth = 1;
    const auto t = fit_tree(d.X, d.y, p);
    const auto ref = oracle::best_split(d.X, d.y);
    EXPECT_EQ(t.nodes()[0].feature, ref.feature) << seed;
    EXPECT_DOUBLE_EQ(t.nodes()[0].threshold, ref.threshold) << seed;
  }
}

TEST(Tree, NodeInvariants) {
  const auto d = tree_data(200, 3, 5);
  TreeParams p;
  p.min_samples_leaf = 3;
  const auto t = fit_tree(d.X, d.y, p);
  check_tree_invariants(t, d.X, d.y);
  for (const auto& n : t.nodes()) {
    if (n.is_leaf()) {
      EXPECT_GE(n.n, 3u);
    }
  }
}

TEST(Tree, RowOrderDoesNotMatter) {
  const auto d = tree_data(80, 3, 6);
  std::vector<Eigen::Index> perm(80);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(9));
  Eigen::MatrixXd Xp(80, 3);
  Eigen::VectorXd yp(80);
  for (Eigen::Index i = 0; i < 80; ++i) {
    Xp.row(i) = d.X.row(perm[static_cast<std::size_t>(i)]);
    yp[i] = d.y[perm[static_cast<std::size_t>(i)]];
  }
  const auto a = fit_tree(d.X, d.y, {}), b = fit_tree(Xp, yp, {});
  ASSERT_EQ(a.nodes().size(), b.nodes().size());
  for (std::size_t k = 0; k < a.nodes().size(); ++k) {
    EXPECT_EQ(a.nodes()[k].feature, b.nodes()[k].feature);
    EXPECT_EQ(a.nodes()[k].threshold, b.nodes()[k].threshold);
    EXPECT_NEAR(a.nodes()[k].value, b.nodes()[k].value, 1e-12);
  }
}

TEST(Tree, InvalidParams) {
  const auto d = tree_data(10, 2, 1);
  TreeParams p;
  p.min_samples_split = 1;
  EXPECT_THROW(fit_tree(d.X, d.y, p), Error);
  EXPECT_THROW(fit_tree(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), {}), Error);
}

TEST(Forest, SingleTreeWithoutBootstrapEqualsFitTree) {
  const auto d = tree_data(120, 4, 7);
  ForestParams fp;
  fp.n_estimators = 1;
  fp.bootstrap = false;
  fp.tree.max_depth = 6;
  const auto forest = fit_forest(d.X, d.y, fp, 99);
  const auto tree = fit_tree(d.X, d.y, fp.tree);
  ASSERT_EQ(forest.trees.size(), 1u);
  EXPECT_TRUE(forest.trees[0] == tree);
  EXPECT_TRUE(forest.predict(d.X) == tree.predict(d.X));
}

TEST(Forest, PredictionIsMeanOfTrees) {
  const auto d = tree_data(100, 3, 8);
  ForestParams fp;
  fp.n_estimators = 7;
  const auto f = fit_forest(d.X, d.y, fp, 1);
  for (Eigen::Index i = 0; i < 10; ++i) {
    double s = 0.0;
    for (const auto& t : f.trees) s += t.predict_row(d.X.row(i));
    EXPECT_EQ(f.predict_row(d.X.row(i)), s / 7.0);
  }
}

TEST(Forest, SeededDeterminismAndPrefixStability) {
  const auto d = tree_data(100, 3, 9);
  ForestParams fp;
  fp.n_estimators = 10;
  const auto a = fit_forest(d.X, d.y, fp, 5), b = fit_forest(d.X, d.y, fp, 5);
  EXPECT_TRUE(a.predict(d.X) == b.predict(d.X));
  fp.n_estimators = 4;
  const auto c = fit_forest(d.X, d.y, fp, 5);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(a.trees[i] == c.trees[i]);
  EXPECT_TRUE(a.predict(d.X, 4) == c.predict(d.X));
  const auto e = fit_forest(d.X, d.y, fp, 6);
  EXPECT_FALSE(e.predict(d.X) == c.predict(d.X));
}

TEST(Boosted, TrainingErrorNonIncreasing) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto d = tree_data(300, 4, seed);
    BoostParams bp;
    bp.n_estimators = 60;
    bp.learning_rate = 0.1;
    bp.num_leaves = 15;
    bp.min_child_samples = 5;
    const auto m = fit_boosted(d.X, d.y, bp, 0);
    double prev = mse(Eigen::VectorXd::Constant(d.y.size(), m.init), d.y);
    for (std::size_t k = 1; k <= m.trees.size(); ++k) {
      const double e = mse(m.predict(d.X, k), d.y);
      EXPECT_LE(e, prev + 1e-12) << "iteration " << k;
      prev = e;
    }
  }
}

TEST(Boosted, OneTreeAtUnitRateIsResidualTree) {
  const auto d = tree_data(200, 3, 4);
  BoostParams bp;
  bp.n_estimators = 1;
  bp.learning_rate = 1.0;
  bp.min_child_samples = 5;
  const auto m = fit_boosted(d.X, d.y, bp, 0);
  EXPECT_NEAR(m.init, d.y.mean(), 1e-12);
  const auto bins = FeatureBinning::fit(d.X, bp.n_bins);
  const Eigen::VectorXd resid = d.y.array() - m.init;
  const auto tree = fit_histogram_tree(d.X, resid, bins, bp);
  EXPECT_TRUE(m.predict(d.X) == (tree.predict(d.X).array() + m.init).matrix());
}

TEST(Boosted, TelescopingAndLeafBound) {
  const auto d = tree_data(250, 3, 12);
  BoostParams bp;
  bp.n_estimators = 12;
  bp.num_leaves = 7;
  bp.min_child_samples = 4;
  const auto m = fit_boosted(d.X, d.y, bp, 0);
  for (const auto& t : m.trees) EXPECT_LE(t.leaf_count(), 7u);
  for (std::size_t k : {1u, 5u, 12u})
    for (Eigen::Index i = 0; i < 5; ++i) {
      double s = m.init;
      for (std::size_t j = 0; j < k; ++j) s += bp.learning_rate * m.trees[j].predict_row(d.X.row(i));
      EXPECT_EQ(m.predict_row(d.X.row(i), k), s);
    }
}

TEST(Boosted, MinChildSamplesAndDepthHonored) {
  const auto d = tree_data(300, 2, 13);
  BoostParams bp;
  bp.n_estimators = 5;
  bp.num_leaves = 31;
  bp.min_child_samples = 40;
  bp.max_depth = 2;
  const auto m = fit_boosted(d.X, d.y, bp, 0);
  for (const auto& t : m.trees) {
    EXPECT_LE(t.depth(), 2);
    for (const auto& n : t.nodes()) {
      if (n.is_leaf()) {
        EXPECT_GE(n.n, 40u);
      }
    }
  }
}

TEST(Boosted, BinningUsesAtMostRequestedBins) {
  const auto d = tree_data(500, 2, 14);
  const auto b = FeatureBinning::fit(d.X, 32);
  for (std::size_t f = 0; f < 2; ++f) {
    EXPECT_LE(b.bins(f), 32);
    for (Eigen::Index i = 1; i < 500; ++i) {
      if (d.X(i, Eigen::Index(f)) > d.X(i - 1, Eigen::Index(f))) {
        EXPECT_GE(b.bin(f, d.X(i, Eigen::Index(f))), b.bin(f, d.X(i - 1, Eigen::Index(f))));
      }
    }
  }
}

TEST(Boosted, InvalidParams) {
  const auto d = tree_data(20, 2, 15);
  BoostParams bp;
  bp.learning_rate = 0.0;
  EXPECT_THROW(fit_boosted(d.X, d.y, bp, 0), Error);
  bp.learning_rate = 0.1;
  bp.num_leaves = 1;
  EXPECT_THROW(fit_boosted(d.X, d.y, bp, 0), Error);
}
