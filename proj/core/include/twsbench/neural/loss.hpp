#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace twsbench::nn {

double pinball(double y, double y_hat, double q);

// Reported "median loss": twice the mean q=0.5 pinball, i.e. the MAE.
double median_loss(std::span<const double> y, std::span<const double> y_hat);

void validate_quantiles(const std::vector<double>& quantiles);

/// Mean pinball over examples, horizons and active quantiles. Outputs are laid out
/// horizon-major: row h * |Q| + k holds quantile k of lead h + 1. Targets are H x B.
/// Inactive quantiles (mask false) do not contribute and receive zero gradient.
struct QuantileLoss {
  std::vector<double> quantiles{0.5};
  std::vector<bool> active;  // empty: all active

  double value(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) const;
  // value and d(value)/d(outputs)
  double value_and_grad(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets, Eigen::MatrixXd& grad) const;
};

}  // namespace twsbench::nn
