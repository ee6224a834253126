#pragma once

#include <string>
#include <string_view>

#include "twsbench/linear.hpp"
#include "twsbench/trees.hpp"

namespace twsbench {

// JSON dumps that reload to bit-identical predictions. Linear weights are keyed by feature
// name; trees use nested {feature, threshold, left, right} / {value} nodes.
std::string linear_model_to_json(const LinearModel& model);
LinearModel linear_model_from_json(std::string_view text);

std::string tree_to_json(const RegressionTree& tree);
RegressionTree tree_from_json(std::string_view text);

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(std::string_view text);

std::string boosted_to_json(const BoostedModel& model);
BoostedModel boosted_from_json(std::string_view text);

}  // namespace twsbench
