#include <algorithm>
#include <numeric>
#include <random>

#include "twsbench/errors.hpp"
#include "twsbench/random.hpp"
#include "twsbench/trees.hpp"

namespace twsbench {

double RegressionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  if (nodes_.empty()) fail(ErrorKind::UntrainedModel, "empty tree");
  int i = 0;
  while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[static_cast<std::size_t>(i)].value;
}

Eigen::VectorXd RegressionTree::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) out[r] = predict_row(X.row(r));
  return out;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) continue;
    d[static_cast<std::size_t>(n.left)] = d[i] + 1;
    d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

void TreeParams::validate() const {
  if (max_depth && *max_depth < 0) fail(ErrorKind::InvalidParams, "max_depth must be >= 0");
  if (min_samples_split < 2) fail(ErrorKind::InvalidParams, "min_samples_split must be >= 2");
  if (min_samples_leaf < 1) fail(ErrorKind::InvalidParams, "min_samples_leaf must be >= 1");
}

void ForestParams::validate() const {
  if (n_estimators < 1) fail(ErrorKind::InvalidParams, "n_estimators must be >= 1");
  tree.validate();
}

namespace {

// Nodes partition sample positions; every feature keeps its own (x, y)-sorted permutation of
// the node's samples in the same [begin, end) segment.
class CartBuilder {
 public:
  CartBuilder(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::size_t> rows,
              const TreeParams& params)
      : X_(X), y_(y), rows_(rows.begin(), rows.end()), params_(params) {
    const std::size_t n = rows_.size();
    const auto p = static_cast<std::size_t>(X.cols());
    order_.assign(p, std::vector<std::uint32_t>(n));
    for (std::size_t f = 0; f < p; ++f) {
      auto& o = order_[f];
      std::iota(o.begin(), o.end(), 0U);
      const auto fi = static_cast<Eigen::Index>(f);
      std::sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double xa = X_(row(a), fi), xb = X_(row(b), fi);
        if (xa != xb) return xa < xb;
        return yv(a) < yv(b);
      });
    }
    left_.assign(n, 0);
    buffer_.resize(n);
  }

  RegressionTree build() {
    grow(0, rows_.size(), 0);
    return RegressionTree(std::move(nodes_));
  }

 private:
  Eigen::Index row(std::uint32_t s) const { return static_cast<Eigen::Index>(rows_[s]); }
  double yv(std::uint32_t s) const { return y_[row(s)]; }

  int grow(std::size_t begin, std::size_t end, int depth) {
    const std::size_t n = end - begin;
    const auto& base = order_[0];
    double sum = 0.0, lo = yv(base[begin]), hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = yv(base[i]);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, sum / static_cast<double>(n), n});

    const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    if (!depth_ok || n < static_cast<std::size_t>(params_.min_samples_split) || n < 2 * min_leaf || lo == hi)
      return id;

    const double dn = static_cast<double>(n);
    const double parent = sum * sum / dn;
    double best_gain = 0.0;
    int best_f = -1;
    std::size_t best_nl = 0;
    double best_thr = 0.0;
    for (std::size_t f = 0; f < order_.size(); ++f) {
      const auto& o = order_[f];
      const auto fi = static_cast<Eigen::Index>(f);
      double sl = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        sl += yv(o[i]);
        const std::size_t nl = i - begin + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double xa = X_(row(o[i]), fi), xb = X_(row(o[i + 1]), fi);
        if (!(xa < xb)) continue;
        const double sr = sum - sl;
        const double gain = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_nl = nl;
          double thr = xa / 2.0 + xb / 2.0;
          if (!(thr < xb)) thr = xa;
          best_thr = thr;
        }
      }
    }
    if (best_f < 0) return id;

    const auto& chosen = order_[static_cast<std::size_t>(best_f)];
    for (std::size_t i = begin; i < end; ++i) left_[chosen[i]] = i < begin + best_nl;
    for (auto& o : order_) {
      std::size_t l = begin, r = 0;
      for (std::size_t i = begin; i < end; ++i) {
        if (left_[o[i]]) o[l++] = o[i];
        else buffer_[r++] = o[i];
      }
      std::copy(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(r), o.begin() + static_cast<std::ptrdiff_t>(l));
    }
    const int lchild = grow(begin, begin + best_nl, depth + 1);
    const int rchild = grow(begin + best_nl, end, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best_f;
    node.threshold = best_thr;
    node.left = lchild;
    node.right = rchild;
    return id;
  }

  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& y_;
  std::vector<std::size_t> rows_;
  TreeParams params_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<char> left_;
  std::vector<std::uint32_t> buffer_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree fit_tree_on_rows(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                std::span<const std::size_t> rows, const TreeParams& params) {
  params.validate();
  if (rows.empty() || X.cols() < 1) fail(ErrorKind::EmptyInput, "tree needs at least one sample and feature");
  if (X.rows() != y.size()) fail(ErrorKind::ShapeMismatch, "design rows and target length differ");
  return CartBuilder(X, y, rows, params).build();
}

RegressionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeParams& params) {
  if (X.rows() < 1) fail(ErrorKind::EmptyInput, "tree needs at least one sample");
  std::vector<std::size_t> rows(static_cast<std::size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_tree_on_rows(X, y, rows, params);
}

double ForestModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x, std::size_t k) const {
  if (trees.empty()) fail(ErrorKind::UntrainedModel, "empty forest");
  const std::size_t m = k == 0 ? trees.size() : std::min(k, trees.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += trees[i].predict_row(x);
  return sum / static_cast<double>(m);
}

Eigen::VectorXd ForestModel::predict(const Eigen::MatrixXd& X, std::size_t k) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) out[r] = predict_row(X.row(r), k);
  return out;
}

ForestModel fit_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ForestParams& params,
                       std::uint64_t seed) {
  params.validate();
  if (X.rows() < 1) fail(ErrorKind::EmptyInput, "forest needs at least one sample");
  ForestModel m;
  m.params = params;
  const auto n = static_cast<std::size_t>(X.rows());
  std::vector<std::size_t> rows(n);
  for (int i = 0; i < params.n_estimators; ++i) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
    if (params.bootstrap) {
      std::mt19937_64 rng(s);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    m.trees.push_back(fit_tree_on_rows(X, y, rows, params.tree));
    m.tree_seeds.push_back(s);
  }
  return m;
}

}  // namespace twsbench
