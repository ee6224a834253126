#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "twsbench/trees.hpp"

namespace twsbench {

enum class TreeFamily { RandomForest, Boosted };
std::string_view to_string(TreeFamily f);

// nullopt encodes "None" (e.g. unlimited max_depth).
using ParamValue = std::optional<double>;

struct GridAxis {
  std::string name;
  std::vector<ParamValue> values;
};

struct GridSearchSpec {
  std::vector<GridAxis> axes;      // first axis varies slowest
  double holdout_fraction = 0.2;   // chronological tail of the training rows

  std::size_t candidate_count() const;
  std::vector<std::vector<ParamValue>> candidates() const;
  void validate() const;

  // The default search ranges: RF 3x3x3x3, boosted 3x3x3x3x2x2.
  static GridSearchSpec random_forest_default();
  static GridSearchSpec boosted_default();
};

struct CandidateScore {
  std::vector<ParamValue> values;
  double holdout_mae = 0.0;
};

using TreeEnsemble = std::variant<ForestModel, BoostedModel>;

struct GridSearchResult {
  std::vector<std::string> names;
  std::vector<CandidateScore> evaluated;  // enumeration order
  std::size_t best_index = 0;
  TreeEnsemble model;                     // winner refit on all training rows

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

ForestParams forest_params_from(const std::vector<std::string>& names, const std::vector<ParamValue>& values);
BoostParams boost_params_from(const std::vector<std::string>& names, const std::vector<ParamValue>& values);

/// Exhaustive search scored by MAE on the last `holdout_fraction` of the (time-ordered)
/// training rows; ties go to the earlier candidate. Candidates that differ only in
/// n_estimators share one fit and are scored on its prefix, which is identical to a separate
/// fit because trees are seeded by index.
GridSearchResult grid_search(TreeFamily family, const GridSearchSpec& spec, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, std::uint64_t seed);

}  // namespace twsbench
