#include "twsbench/neural/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twsbench/errors.hpp"

namespace twsbench::nn {

double pinball(double y, double y_hat, double q) {
  if (!std::isfinite(y) || !std::isfinite(y_hat)) fail(ErrorKind::NonFinite, "non-finite pinball input");
  const double d = y - y_hat;
  return std::max(q * d, (q - 1.0) * d);
}

double median_loss(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) fail(ErrorKind::ShapeMismatch, "median loss inputs differ in length");
  if (y.empty()) fail(ErrorKind::EmptyInput, "median loss of empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += pinball(y[i], y_hat[i], 0.5);
  return 2.0 * s / static_cast<double>(y.size());
}

void validate_quantiles(const std::vector<double>& quantiles) {
  if (quantiles.empty()) fail(ErrorKind::InvalidParams, "at least one quantile is required");
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    if (!(quantiles[i] > 0.0 && quantiles[i] < 1.0))
      fail(ErrorKind::InvalidParams, "quantile " + std::to_string(quantiles[i]) + " is outside (0, 1)");
    if (i > 0 && !(quantiles[i] > quantiles[i - 1]))
      fail(ErrorKind::InvalidParams, "quantiles must be sorted and distinct");
  }
}

namespace {

double evaluate(const QuantileLoss& L, const Eigen::MatrixXd& out, const Eigen::MatrixXd& tgt, Eigen::MatrixXd* grad) {
  const auto nq = static_cast<Eigen::Index>(L.quantiles.size());
  if (out.rows() != tgt.rows() * nq || out.cols() != tgt.cols())
    fail(ErrorKind::ShapeMismatch, "loss expects " + std::to_string(tgt.rows() * nq) + "x" +
                                       std::to_string(tgt.cols()) + " outputs, got " + std::to_string(out.rows()) +
                                       "x" + std::to_string(out.cols()));
  if (!L.active.empty() && L.active.size() != L.quantiles.size())
    fail(ErrorKind::ShapeMismatch, "quantile mask size differs from quantile count");
  Eigen::Index n_active = 0;
  for (Eigen::Index k = 0; k < nq; ++k) n_active += (L.active.empty() || L.active[k]) ? 1 : 0;
  if (n_active == 0) fail(ErrorKind::InvalidParams, "no active quantile");
  const double denom = static_cast<double>(tgt.rows() * n_active * tgt.cols());
  if (grad) grad->setZero(out.rows(), out.cols());
  double total = 0.0;
  for (Eigen::Index b = 0; b < tgt.cols(); ++b)
    for (Eigen::Index h = 0; h < tgt.rows(); ++h)
      for (Eigen::Index k = 0; k < nq; ++k) {
        if (!L.active.empty() && !L.active[k]) continue;
        const double q = L.quantiles[static_cast<std::size_t>(k)];
        const Eigen::Index r = h * nq + k;
        const double y = tgt(h, b), yh = out(r, b);
        total += pinball(y, yh, q);
        if (grad) {
          const double d = y - yh;
          (*grad)(r, b) = (d > 0.0 ? -q : (d < 0.0 ? 1.0 - q : 0.0)) / denom;
        }
      }
  return total / denom;
}

}  // namespace

double QuantileLoss::value(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) const {
  return evaluate(*this, outputs, targets, nullptr);
}

double QuantileLoss::value_and_grad(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets,
                                    Eigen::MatrixXd& grad) const {
  return evaluate(*this, outputs, targets, &grad);
}

}  // namespace twsbench::nn
