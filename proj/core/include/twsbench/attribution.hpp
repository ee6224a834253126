#pragma once

#include <string>
#include <vector>

#include "twsbench/features.hpp"
#include "twsbench/neural/models.hpp"

namespace twsbench {

struct AttributionReport {
  std::string model;
  int sequence_length = 0;
  std::vector<double> importance;  // index 0 is the oldest step
};

/// Mean |f(x) - f(x with step s's dynamic channels at their training mean)| of the lead-1
/// point forecast, in standardized target units; averaged over each basin's examples, then
/// across basins. Standardized dynamics have training mean 0.
AttributionReport occlusion_importance(const nn::NeuralModel& model, const SupervisedSet& set, Split split,
                                       const std::vector<double>& quantiles, const std::string& model_name);

/// Attention per step averaged over heads and examples, rescaled to sum to 1.
AttributionReport mean_attention(const nn::NeuralModel& model, const SupervisedSet& set, Split split,
                                 const std::string& model_name);

}  // namespace twsbench
