#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace twsbench {

struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  std::string fitted_on;                    // basin id or "global"
  std::vector<std::size_t> dropped_columns; // rank-deficient columns, weight fixed at 0
  std::vector<std::string> feature_names;

  double predict(const Eigen::VectorXd& x) const { return weights.dot(x) + intercept; }
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// Relative pivot magnitude below which a column is treated as linearly dependent.
inline constexpr double kRankTolerance = 1e-10;

/// Least squares with an internal intercept via column-pivoted Householder QR on the
/// centered design. Columns whose pivot falls below kRankTolerance of the largest pivot are
/// dropped (weight 0) and recorded.
LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct BasinDesign {
  std::string basin_id;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

// One independent OLS fit per basin; errors are rethrown tagged with the basin id.
std::map<std::string, LinearModel> fit_linear_single(const std::vector<BasinDesign>& basins);

// One OLS fit on the row-concatenation of every basin's (already standardized) rows.
LinearModel fit_linear_glob(const std::vector<BasinDesign>& basins);

}  // namespace twsbench
