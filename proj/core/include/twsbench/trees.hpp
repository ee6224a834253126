#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace twsbench {

/// Flattened binary tree node. Leaves have feature < 0. Samples with x[feature] <= threshold
/// go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // mean training target of the node
  std::size_t n = 0;

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  int depth() const;

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

inline bool operator==(const TreeNode& a, const TreeNode& b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.left == b.left && a.right == b.right &&
         a.value == b.value && a.n == b.n;
}

struct TreeParams {
  std::optional<int> max_depth;  // nullopt: unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;

  void validate() const;
};

/// Greedy CART on squared error. Candidate thresholds are midpoints between distinct sorted
/// values; equal gains resolve to the lowest feature index, then the lowest threshold.
RegressionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeParams& params);

// Same as fit_tree on the multiset of rows named by `rows` (bootstrap samples repeat rows).
RegressionTree fit_tree_on_rows(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                std::span<const std::size_t> rows, const TreeParams& params);

struct ForestParams {
  int n_estimators = 100;
  TreeParams tree;
  bool bootstrap = true;  // false only as a test hook: every tree sees all rows

  void validate() const;
};

class ForestModel {
 public:
  ForestParams params;
  std::vector<RegressionTree> trees;
  std::vector<std::uint64_t> tree_seeds;

  // Unweighted mean over the first `k` trees (all when k is 0).
  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x, std::size_t k = 0) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X, std::size_t k = 0) const;
};

// Tree i draws its bootstrap from a stream seeded by (seed, i), so the first k trees do not
// depend on n_estimators.
ForestModel fit_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ForestParams& params,
                       std::uint64_t seed);

// ---- gradient boosting -----------------------------------------------------

struct BoostParams {
  int n_estimators = 100;
  int max_depth = -1;  // <= 0: unlimited
  double learning_rate = 0.1;
  int num_leaves = 31;
  int min_child_samples = 20;
  double min_gain_to_split = 0.0;
  int n_bins = 32;

  void validate() const;
};

/// Per-feature histogram bin edges: a value goes to the first bin whose upper edge is >= it.
class FeatureBinning {
 public:
  FeatureBinning() = default;
  static FeatureBinning fit(const Eigen::MatrixXd& X, int max_bins);

  std::size_t features() const { return edges_.size(); }
  const std::vector<double>& edges(std::size_t f) const { return edges_[f]; }
  int bins(std::size_t f) const { return static_cast<int>(edges_[f].size()) + 1; }
  int bin(std::size_t f, double x) const;

 private:
  std::vector<std::vector<double>> edges_;
};

/// Leaf-wise growth on binned features: repeatedly split the leaf with the largest gain
/// (sum-of-squares reduction of the residuals) until num_leaves, honoring max_depth,
/// min_child_samples and min_gain_to_split. Leaf values are mean residuals.
RegressionTree fit_histogram_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& residual,
                                  const FeatureBinning& binning, const BoostParams& params);

class BoostedModel {
 public:
  BoostParams params;
  double init = 0.0;
  std::vector<RegressionTree> trees;

  // init + sum of lr * tree_j(x) over the first k trees (all when k is 0).
  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x, std::size_t k = 0) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X, std::size_t k = 0) const;
};

// Deterministic; `seed` is accepted for interface symmetry with the forest (no subsampling).
BoostedModel fit_boosted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BoostParams& params,
                         std::uint64_t seed);

}  // namespace twsbench
