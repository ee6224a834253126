#pragma once

#include <string>
#include <vector>

#include "twsbench/neural/loss.hpp"
#include "twsbench/neural/models.hpp"

namespace twsbench::nn {

// Denominator floor so tensors with an identically zero gradient (e.g. the attention key
// bias, which softmax cancels) compare by absolute difference.
inline constexpr double kGradNormFloor = 1e-6;

struct TensorGradCheck {
  std::string name;
  double relative_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||, floor)
  double analytic_norm = 0.0;
};

/// Central finite differences of the loss (inference mode, no dropout) for every scalar of
/// every parameter tensor, compared tensor by tensor with the analytic gradient.
std::vector<TensorGradCheck> gradient_check(NeuralModel& model, const Batch& batch, const QuantileLoss& loss,
                                            double step = 1e-5);

}  // namespace twsbench::nn
