#include "twsbench/neural/parameters.hpp"

#include <algorithm>
#include <cmath>

#include "twsbench/errors.hpp"

namespace twsbench::nn {

std::size_t ParameterSet::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (contains(name)) fail(ErrorKind::InvalidParams, "duplicate parameter '" + name + "'");
  names_.push_back(std::move(name));
  values_.push_back(Eigen::MatrixXd::Zero(rows, cols));
  return values_.size() - 1;
}

std::size_t ParameterSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  fail(ErrorKind::ShapeMismatch, "no parameter named '" + std::string(name) + "'");
}

bool ParameterSet::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet z;
  for (std::size_t i = 0; i < size(); ++i) z.add(names_[i], values_[i].rows(), values_[i].cols());
  return z;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

void ParameterSet::set_zero() {
  for (auto& v : values_) v.setZero();
}

bool ParameterSet::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](const auto& v) { return v.allFinite(); });
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (values_[i].rows() != other.values_[i].rows() || values_[i].cols() != other.values_[i].cols()) return false;
    if (values_[i] != other.values_[i]) return false;
  }
  return true;
}

std::string_view to_string(InitScheme s) { return s == InitScheme::Xavier ? "xavier" : "orthogonal"; }

InitScheme parse_init_scheme(std::string_view s) {
  if (s == "xavier") return InitScheme::Xavier;
  if (s == "orthogonal") return InitScheme::Orthogonal;
  fail(ErrorKind::UnknownScheme, "unknown weight-init scheme '" + std::string(s) + "'");
}

void xavier_uniform(Eigen::MatrixXd& w, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
}

void orthogonal(Eigen::MatrixXd& w, Rng& rng) {
  const Eigen::Index r = w.rows(), c = w.cols();
  const bool tall = r >= c;
  const Eigen::Index big = tall ? r : c, small = tall ? c : r;
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(big, small);
  for (Eigen::Index j = 0; j < small; ++j)
    for (Eigen::Index i = 0; i < big; ++i) a(i, j) = n(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
  // sign fix makes the factor unique: diag(R) > 0
  const Eigen::MatrixXd& rr = qr.matrixQR();
  for (Eigen::Index j = 0; j < small; ++j)
    if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
  w = tall ? q : Eigen::MatrixXd(q.transpose());
}

void init_matrix(Eigen::MatrixXd& w, InitScheme scheme, Rng& rng) {
  if (scheme == InitScheme::Xavier) xavier_uniform(w, rng);
  else orthogonal(w, rng);
}

Adam::Adam(const ParameterSet& shape, double lr, double beta1, double beta2, double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(shape.zeros_like()), v_(shape.zeros_like()) {
  if (!(lr > 0.0)) fail(ErrorKind::InvalidParams, "learning rate must be positive");
}

void Adam::step(ParameterSet& params, const ParameterSet& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * grads[i];
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * grads[i].cwiseProduct(grads[i]);
    params[i].array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

}  // namespace twsbench::nn
