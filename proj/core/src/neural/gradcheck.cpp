#include "twsbench/neural/gradcheck.hpp"

#include <algorithm>

namespace twsbench::nn {

std::vector<TensorGradCheck> gradient_check(NeuralModel& model, const Batch& batch, const QuantileLoss& loss,
                                            double step) {
  Eigen::MatrixXd d_out;
  loss.value_and_grad(model.forward(batch, nullptr), batch.targets, d_out);
  ParameterSet grads = model.params().zeros_like();
  model.backward(d_out, grads);

  std::vector<TensorGradCheck> out;
  auto& params = model.params();
  for (std::size_t p = 0; p < params.size(); ++p) {
    Eigen::MatrixXd numeric(params[p].rows(), params[p].cols());
    for (Eigen::Index k = 0; k < params[p].size(); ++k) {
      double& w = params[p].data()[k];
      const double saved = w;
      w = saved + step;
      const double up = loss.value(model.predict(batch), batch.targets);
      w = saved - step;
      const double down = loss.value(model.predict(batch), batch.targets);
      w = saved;
      numeric.data()[k] = (up - down) / (2.0 * step);
    }
    const double na = grads[p].norm(), nn = numeric.norm();
    const double denom = std::max({na, nn, kGradNormFloor});
    out.push_back({params.name(p), (grads[p] - numeric).norm() / denom, na});
  }
  return out;
}

}  // namespace twsbench::nn
