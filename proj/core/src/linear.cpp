#include "twsbench/linear.hpp"

#include <cmath>

#include "twsbench/errors.hpp"

namespace twsbench {

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& X) const {
  return (X * weights).array() + intercept;
}

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() < 1 || X.cols() < 1) fail(ErrorKind::EmptyInput, "OLS needs at least one row and column");
  if (X.rows() != y.size()) fail(ErrorKind::ShapeMismatch, "design rows and target length differ");
  if (!X.allFinite() || !y.allFinite()) fail(ErrorKind::NonFinite, "OLS inputs contain non-finite values");

  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xc);
  const Eigen::MatrixXd& R = qr.matrixR();
  const Eigen::Index k = std::min(Xc.rows(), Xc.cols());
  const double max_pivot = k > 0 ? std::abs(R(0, 0)) : 0.0;
  Eigen::Index rank = 0;
  while (rank < k && max_pivot > 0.0 && std::abs(R(rank, rank)) >= kRankTolerance * max_pivot) ++rank;

  LinearModel m;
  m.weights = Eigen::VectorXd::Zero(X.cols());
  const auto& perm = qr.colsPermutation().indices();
  if (rank > 0) {
    // Q^T y, then back-substitute the leading rank x rank triangle
    Eigen::VectorXd qty = yc;
    qty.applyOnTheLeft(qr.householderQ().transpose());
    const Eigen::VectorXd z =
        R.topLeftCorner(rank, rank).triangularView<Eigen::Upper>().solve(qty.head(rank));
    for (Eigen::Index i = 0; i < rank; ++i) m.weights[perm[i]] = z[i];
  }
  for (Eigen::Index i = rank; i < X.cols(); ++i) m.dropped_columns.push_back(static_cast<std::size_t>(perm[i]));
  std::sort(m.dropped_columns.begin(), m.dropped_columns.end());
  m.intercept = y_mean - x_mean.dot(m.weights);
  return m;
}

std::map<std::string, LinearModel> fit_linear_single(const std::vector<BasinDesign>& basins) {
  std::map<std::string, LinearModel> out;
  for (const auto& b : basins) {
    try {
      auto m = fit_ols(b.X, b.y);
      m.fitted_on = b.basin_id;
      out.emplace(b.basin_id, std::move(m));
    } catch (const Error& e) {
      throw Error(e.kind(), "basin " + b.basin_id + ": " + e.what());
    }
  }
  return out;
}

LinearModel fit_linear_glob(const std::vector<BasinDesign>& basins) {
  if (basins.empty()) fail(ErrorKind::EmptyInput, "no basins to pool");
  Eigen::Index rows = 0;
  const Eigen::Index cols = basins.front().X.cols();
  for (const auto& b : basins) {
    if (b.X.cols() != cols) fail(ErrorKind::ShapeMismatch, "basins disagree on feature count");
    rows += b.X.rows();
  }
  Eigen::MatrixXd X(rows, cols);
  Eigen::VectorXd y(rows);
  Eigen::Index r = 0;
  for (const auto& b : basins) {
    X.middleRows(r, b.X.rows()) = b.X;
    y.segment(r, b.y.size()) = b.y;
    r += b.X.rows();
  }
  auto m = fit_ols(X, y);
  m.fitted_on = "global";
  return m;
}

}  // namespace twsbench
