#include <cmath>

#include "twsbench/dataset.hpp"
#include "twsbench/errors.hpp"

namespace twsbench {

Scaler::Scaler(Eigen::VectorXd mean, Eigen::VectorXd std) : mean_(std::move(mean)), std_(std::move(std)) {
  if (mean_.size() != std_.size()) fail(ErrorKind::ShapeMismatch, "scaler mean/std size mismatch");
  for (Eigen::Index i = 0; i < std_.size(); ++i) std_[i] = std::max(std_[i], kStdFloor);
}

Scaler Scaler::fit(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) fail(ErrorKind::Degenerate, "scaler needs at least two rows");
  const auto n = static_cast<double>(data.rows());
  Eigen::VectorXd mean(data.cols()), sd(data.cols());
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    const auto col = data.col(c);
    if (col.maxCoeff() == col.minCoeff()) {
      // exact, so constant columns transform to exactly zero
      mean[c] = col[0];
      sd[c] = 0.0;
      continue;
    }
    const double m = col.sum() / n;
    mean[c] = m;
    sd[c] = std::sqrt((col.array() - m).square().sum() / n);
  }
  return Scaler(std::move(mean), std::move(sd));
}

Eigen::MatrixXd Scaler::transform(const Eigen::MatrixXd& data) const {
  if (data.cols() != mean_.size()) fail(ErrorKind::ShapeMismatch, "scaler column count mismatch");
  return (data.rowwise() - mean_.transpose()).array().rowwise() / std_.transpose().array();
}

Eigen::MatrixXd Scaler::inverse(const Eigen::MatrixXd& data) const {
  if (data.cols() != mean_.size()) fail(ErrorKind::ShapeMismatch, "scaler column count mismatch");
  return (data.array().rowwise() * std_.transpose().array()).matrix().rowwise() + mean_.transpose();
}

Scaler fit_scaler(const SeriesView& train_view) {
  if (train_view.series == nullptr || train_view.size < 2)
    fail(ErrorKind::Degenerate, "training view must contain at least two steps");
  return Scaler::fit(train_view.channels());
}

}  // namespace twsbench
