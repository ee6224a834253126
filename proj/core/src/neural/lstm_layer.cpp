#include "twsbench/neural/lstm_layer.hpp"

#include "twsbench/errors.hpp"

namespace twsbench::nn {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

LstmLayer::LstmLayer(ParameterSet& params, const std::string& prefix, Eigen::Index input, Eigen::Index hidden)
    : in_(input), hid_(hidden) {
  w_ih_ = params.add(prefix + ".w_ih", 4 * hidden, input);
  w_hh_ = params.add(prefix + ".w_hh", 4 * hidden, hidden);
  b_ = params.add(prefix + ".b", 4 * hidden, 1);
}

void LstmLayer::init(ParameterSet& params, InitScheme scheme, Rng& rng) const {
  init_matrix(params[w_ih_], scheme, rng);
  init_matrix(params[w_hh_], scheme, rng);
  params[b_].setZero();
  params[b_].middleRows(hid_, hid_).setOnes();
}

void LstmLayer::forward(const ParameterSet& params, const std::vector<Eigen::MatrixXd>& x, const Eigen::MatrixXd& h0,
                        Cache& cache) const {
  const auto& Wih = params[w_ih_];
  const auto& Whh = params[w_hh_];
  const auto& b = params[b_];
  const std::size_t L = x.size();
  const Eigen::Index B = h0.cols();
  cache.x = x;
  cache.h.assign(L + 1, Eigen::MatrixXd());
  cache.c.assign(L + 1, Eigen::MatrixXd());
  cache.i.resize(L);
  cache.f.resize(L);
  cache.g.resize(L);
  cache.o.resize(L);
  cache.h[0] = h0;
  cache.c[0] = Eigen::MatrixXd::Zero(hid_, B);
  for (std::size_t t = 0; t < L; ++t) {
    if (x[t].rows() != in_ || x[t].cols() != B)
      fail(ErrorKind::ShapeMismatch, "LSTM step input has shape " + std::to_string(x[t].rows()) + "x" +
                                         std::to_string(x[t].cols()) + ", expected " + std::to_string(in_) + "x" +
                                         std::to_string(B));
    Eigen::MatrixXd z = Wih * x[t] + Whh * cache.h[t];
    z.colwise() += b.col(0);
    cache.i[t] = sigmoid(z.topRows(hid_));
    cache.f[t] = sigmoid(z.middleRows(hid_, hid_));
    cache.g[t] = z.middleRows(2 * hid_, hid_).array().tanh().matrix();
    cache.o[t] = sigmoid(z.bottomRows(hid_));
    cache.c[t + 1] = cache.f[t].cwiseProduct(cache.c[t]) + cache.i[t].cwiseProduct(cache.g[t]);
    cache.h[t + 1] = cache.o[t].cwiseProduct(cache.c[t + 1].array().tanh().matrix());
  }
}

void LstmLayer::backward(const ParameterSet& params, ParameterSet& grads, const Cache& cache,
                         const std::vector<Eigen::MatrixXd>& dH, std::vector<Eigen::MatrixXd>& dx,
                         Eigen::MatrixXd& dh0) const {
  const auto& Wih = params[w_ih_];
  const auto& Whh = params[w_hh_];
  const std::size_t L = cache.x.size();
  const Eigen::Index B = cache.h[0].cols();
  Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(hid_, B);
  Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(hid_, B);
  Eigen::MatrixXd dz(4 * hid_, B);
  dx.assign(L, Eigen::MatrixXd());
  for (std::size_t s = L; s-- > 0;) {
    Eigen::MatrixXd dh = dh_next;
    if (s < dH.size() && dH[s].size() > 0) dh += dH[s];
    const Eigen::ArrayXXd tc = cache.c[s + 1].array().tanh();
    const Eigen::ArrayXXd& i = cache.i[s].array();
    const Eigen::ArrayXXd& f = cache.f[s].array();
    const Eigen::ArrayXXd& g = cache.g[s].array();
    const Eigen::ArrayXXd& o = cache.o[s].array();
    const Eigen::ArrayXXd dc = dc_next.array() + dh.array() * o * (1.0 - tc * tc);
    dz.topRows(hid_) = (dc * g * i * (1.0 - i)).matrix();
    dz.middleRows(hid_, hid_) = (dc * cache.c[s].array() * f * (1.0 - f)).matrix();
    dz.middleRows(2 * hid_, hid_) = (dc * i * (1.0 - g * g)).matrix();
    dz.bottomRows(hid_) = (dh.array() * tc * o * (1.0 - o)).matrix();
    grads[w_ih_].noalias() += dz * cache.x[s].transpose();
    grads[w_hh_].noalias() += dz * cache.h[s].transpose();
    grads[b_] += dz.rowwise().sum();
    dx[s] = Wih.transpose() * dz;
    dh_next = Whh.transpose() * dz;
    dc_next = (dc * f).matrix();
  }
  dh0 = dh_next;
}

}  // namespace twsbench::nn
