#include <algorithm>
#include <limits>

#include "twsbench/errors.hpp"
#include "twsbench/trees.hpp"

namespace twsbench {

void BoostParams::validate() const {
  if (n_estimators < 1) fail(ErrorKind::InvalidParams, "n_estimators must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail(ErrorKind::InvalidParams, "learning_rate must be in (0, 1]");
  if (num_leaves < 2) fail(ErrorKind::InvalidParams, "num_leaves must be >= 2");
  if (min_child_samples < 1) fail(ErrorKind::InvalidParams, "min_child_samples must be >= 1");
  if (min_gain_to_split < 0.0) fail(ErrorKind::InvalidParams, "min_gain_to_split must be >= 0");
  if (n_bins < 2 || n_bins > 256) fail(ErrorKind::InvalidParams, "n_bins must be in [2, 256]");
}

FeatureBinning FeatureBinning::fit(const Eigen::MatrixXd& X, int max_bins) {
  FeatureBinning b;
  b.edges_.resize(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    std::vector<double> u(X.col(f).data(), X.col(f).data() + X.rows());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    auto mid = [](double a, double c) {
      const double m = a / 2.0 + c / 2.0;
      return m < c ? m : a;
    };
    auto& e = b.edges_[static_cast<std::size_t>(f)];
    const std::size_t U = u.size();
    const auto B = static_cast<std::size_t>(max_bins);
    if (U <= B) {
      for (std::size_t i = 1; i < U; ++i) e.push_back(mid(u[i - 1], u[i]));
    } else {
      // equal-count bins over the distinct values
      for (std::size_t j = 1; j < B; ++j) {
        const std::size_t k = j * U / B;
        const double edge = mid(u[k - 1], u[k]);
        if (e.empty() || edge > e.back()) e.push_back(edge);
      }
    }
  }
  return b;
}

int FeatureBinning::bin(std::size_t f, double x) const {
  const auto& e = edges_[f];
  return static_cast<int>(std::lower_bound(e.begin(), e.end(), x) - e.begin());
}

namespace {

using BinMatrix = std::vector<std::vector<std::uint8_t>>;  // [feature][sample]

BinMatrix bin_all(const Eigen::MatrixXd& X, const FeatureBinning& binning) {
  BinMatrix out(static_cast<std::size_t>(X.cols()), std::vector<std::uint8_t>(static_cast<std::size_t>(X.rows())));
  for (Eigen::Index f = 0; f < X.cols(); ++f)
    for (Eigen::Index r = 0; r < X.rows(); ++r)
      out[static_cast<std::size_t>(f)][static_cast<std::size_t>(r)] =
          static_cast<std::uint8_t>(binning.bin(static_cast<std::size_t>(f), X(r, f)));
  return out;
}

struct Candidate {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  int bin = -1;
  bool valid() const { return feature >= 0; }
};

struct Leaf {
  std::vector<std::uint32_t> samples;  // ascending
  int node = 0;
  int depth = 0;
  Candidate best;
};

Candidate best_split(const Leaf& leaf, const BinMatrix& bins, const FeatureBinning& binning,
                     const Eigen::VectorXd& r, const BoostParams& p) {
  Candidate best;
  const std::size_t n = leaf.samples.size();
  const auto min_child = static_cast<std::size_t>(p.min_child_samples);
  if (n < 2 * min_child) return best;
  if (p.max_depth > 0 && leaf.depth >= p.max_depth) return best;
  double total = 0.0;
  for (auto s : leaf.samples) total += r[s];
  const double parent = total * total / static_cast<double>(n);

  std::vector<double> g;
  std::vector<std::size_t> c;
  for (std::size_t f = 0; f < bins.size(); ++f) {
    const int nb = binning.bins(f);
    if (nb < 2) continue;
    g.assign(static_cast<std::size_t>(nb), 0.0);
    c.assign(static_cast<std::size_t>(nb), 0);
    for (auto s : leaf.samples) {
      const auto b = bins[f][s];
      g[b] += r[s];
      ++c[b];
    }
    double gl = 0.0;
    std::size_t nl = 0;
    for (int b = 0; b + 1 < nb; ++b) {
      gl += g[static_cast<std::size_t>(b)];
      nl += c[static_cast<std::size_t>(b)];
      const std::size_t nr = n - nl;
      if (nl < min_child) continue;
      if (nr < min_child) break;
      if (c[static_cast<std::size_t>(b)] == 0) continue;  // same partition as an earlier bin
      const double gr = total - gl;
      const double gain = gl * gl / static_cast<double>(nl) + gr * gr / static_cast<double>(nr) - parent;
      if (gain > best.gain) best = Candidate{gain, static_cast<int>(f), b};
    }
  }
  if (!(best.gain > p.min_gain_to_split)) return Candidate{};
  return best;
}

RegressionTree grow_leafwise(const BinMatrix& bins, const FeatureBinning& binning, const Eigen::VectorXd& r,
                             const BoostParams& p) {
  const auto n = static_cast<std::uint32_t>(r.size());
  std::vector<TreeNode> nodes;
  std::vector<Leaf> leaves;
  Leaf root;
  root.samples.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) root.samples[i] = i;
  nodes.push_back(TreeNode{});
  root.best = best_split(root, bins, binning, r, p);
  leaves.push_back(std::move(root));

  while (static_cast<int>(leaves.size()) < p.num_leaves) {
    int pick = -1;
    for (std::size_t i = 0; i < leaves.size(); ++i)
      if (leaves[i].best.valid() && (pick < 0 || leaves[i].best.gain > leaves[static_cast<std::size_t>(pick)].best.gain))
        pick = static_cast<int>(i);
    if (pick < 0) break;
    Leaf parent = std::move(leaves[static_cast<std::size_t>(pick)]);
    const auto f = static_cast<std::size_t>(parent.best.feature);
    const int b = parent.best.bin;
    Leaf left, right;
    for (auto s : parent.samples) (bins[f][s] <= b ? left : right).samples.push_back(s);
    left.depth = right.depth = parent.depth + 1;
    left.node = static_cast<int>(nodes.size());
    right.node = left.node + 1;
    nodes.push_back(TreeNode{});
    nodes.push_back(TreeNode{});
    auto& pn = nodes[static_cast<std::size_t>(parent.node)];
    pn.feature = static_cast<int>(f);
    pn.threshold = binning.edges(f)[static_cast<std::size_t>(b)];
    pn.left = left.node;
    pn.right = right.node;
    left.best = best_split(left, bins, binning, r, p);
    right.best = best_split(right, bins, binning, r, p);
    // keep children where the parent was, so ties favor earlier-created regions
    leaves[static_cast<std::size_t>(pick)] = std::move(left);
    leaves.insert(leaves.begin() + pick + 1, std::move(right));
  }

  // node statistics: leaves from their samples, internal nodes from their children
  std::vector<double> sums(nodes.size(), 0.0);
  for (const auto& leaf : leaves) {
    auto& node = nodes[static_cast<std::size_t>(leaf.node)];
    double s = 0.0;
    for (auto i : leaf.samples) s += r[i];
    node.n = leaf.samples.size();
    node.value = s / static_cast<double>(node.n);
    sums[static_cast<std::size_t>(leaf.node)] = s;
  }
  for (std::size_t i = nodes.size(); i-- > 0;) {
    auto& node = nodes[i];
    if (node.is_leaf()) continue;
    node.n = nodes[static_cast<std::size_t>(node.left)].n + nodes[static_cast<std::size_t>(node.right)].n;
    sums[i] = sums[static_cast<std::size_t>(node.left)] + sums[static_cast<std::size_t>(node.right)];
    node.value = sums[i] / static_cast<double>(node.n);
  }
  return RegressionTree(std::move(nodes));
}

}  // namespace

RegressionTree fit_histogram_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& residual,
                                  const FeatureBinning& binning, const BoostParams& params) {
  params.validate();
  if (X.rows() < 1) fail(ErrorKind::EmptyInput, "tree needs at least one sample");
  if (X.rows() != residual.size()) fail(ErrorKind::ShapeMismatch, "design rows and residual length differ");
  if (binning.features() != static_cast<std::size_t>(X.cols()))
    fail(ErrorKind::ShapeMismatch, "binning feature count differs from design");
  return grow_leafwise(bin_all(X, binning), binning, residual, params);
}

double BoostedModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x, std::size_t k) const {
  const std::size_t m = k == 0 ? trees.size() : std::min(k, trees.size());
  double out = init;
  for (std::size_t i = 0; i < m; ++i) out += params.learning_rate * trees[i].predict_row(x);
  return out;
}

Eigen::VectorXd BoostedModel::predict(const Eigen::MatrixXd& X, std::size_t k) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) out[r] = predict_row(X.row(r), k);
  return out;
}

BoostedModel fit_boosted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BoostParams& params,
                         std::uint64_t /*seed*/) {
  params.validate();
  if (X.rows() < 1 || X.cols() < 1) fail(ErrorKind::EmptyInput, "boosting needs at least one sample and feature");
  if (X.rows() != y.size()) fail(ErrorKind::ShapeMismatch, "design rows and target length differ");
  BoostedModel m;
  m.params = params;
  m.init = y.mean();
  const auto binning = FeatureBinning::fit(X, params.n_bins);
  const auto bins = bin_all(X, binning);
  Eigen::VectorXd pred = Eigen::VectorXd::Constant(y.size(), m.init);
  for (int i = 0; i < params.n_estimators; ++i) {
    const Eigen::VectorXd residual = y - pred;
    auto tree = grow_leafwise(bins, binning, residual, params);
    for (Eigen::Index r = 0; r < X.rows(); ++r) pred[r] += params.learning_rate * tree.predict_row(X.row(r));
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace twsbench
