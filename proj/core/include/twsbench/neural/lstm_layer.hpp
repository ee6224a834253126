#pragma once

#include <string>
#include <vector>

#include "twsbench/neural/parameters.hpp"

namespace twsbench::nn {

/// Single-layer LSTM over column-major batches (features x B). Gate blocks are stacked
/// input, forget, cell, output in `<prefix>.w_ih` (4h x in), `<prefix>.w_hh` (4h x h), `<prefix>.b`.
class LstmLayer {
 public:
  struct Cache {
    std::vector<Eigen::MatrixXd> x;           // L inputs
    std::vector<Eigen::MatrixXd> h, c;        // L + 1 states, index 0 is the initial state
    std::vector<Eigen::MatrixXd> i, f, g, o;  // L gate activations
  };

  LstmLayer() = default;
  LstmLayer(ParameterSet& params, const std::string& prefix, Eigen::Index input, Eigen::Index hidden);

  Eigen::Index input_size() const { return in_; }
  Eigen::Index hidden_size() const { return hid_; }

  // Forget-gate bias 1, other biases 0.
  void init(ParameterSet& params, InitScheme scheme, Rng& rng) const;

  void forward(const ParameterSet& params, const std::vector<Eigen::MatrixXd>& x, const Eigen::MatrixXd& h0,
               Cache& cache) const;

  // dH[t] is dLoss/dh_{t+1}; empty matrices count as zero. Accumulates into grads.
  void backward(const ParameterSet& params, ParameterSet& grads, const Cache& cache,
                const std::vector<Eigen::MatrixXd>& dH, std::vector<Eigen::MatrixXd>& dx, Eigen::MatrixXd& dh0) const;

 private:
  Eigen::Index in_ = 0, hid_ = 0;
  std::size_t w_ih_ = 0, w_hh_ = 0, b_ = 0;
};

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z);

}  // namespace twsbench::nn
