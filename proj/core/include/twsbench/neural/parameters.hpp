#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace twsbench::nn {

using Rng = std::mt19937_64;

/// Named tensors in a fixed canonical order. Vectors are stored as n x 1 matrices.
class ParameterSet {
 public:
  std::size_t add(std::string name, Eigen::Index rows, Eigen::Index cols);

  std::size_t size() const { return values_.size(); }
  std::size_t index_of(std::string_view name) const;  // throws if absent
  bool contains(std::string_view name) const;

  Eigen::MatrixXd& operator[](std::size_t i) { return values_[i]; }
  const Eigen::MatrixXd& operator[](std::size_t i) const { return values_[i]; }
  Eigen::MatrixXd& at(std::string_view name) { return values_[index_of(name)]; }
  const Eigen::MatrixXd& at(std::string_view name) const { return values_[index_of(name)]; }

  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  // Same names and shapes, all zeros.
  ParameterSet zeros_like() const;
  std::size_t scalar_count() const;
  void set_zero();
  bool all_finite() const;

  bool operator==(const ParameterSet& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Eigen::MatrixXd> values_;
};

enum class InitScheme { Xavier, Orthogonal };
std::string_view to_string(InitScheme s);
InitScheme parse_init_scheme(std::string_view s);

// Uniform in +-sqrt(6 / (fan_in + fan_out)), fan_in = cols, fan_out = rows.
void xavier_uniform(Eigen::MatrixXd& w, Rng& rng);
// Orthonormal columns (rows when wide) from the QR factor of a standard normal matrix.
void orthogonal(Eigen::MatrixXd& w, Rng& rng);
void init_matrix(Eigen::MatrixXd& w, InitScheme scheme, Rng& rng);

/// Adam with bias correction.
class Adam {
 public:
  Adam(const ParameterSet& shape, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(ParameterSet& params, const ParameterSet& grads);
  std::int64_t steps() const { return t_; }

 private:
  double lr_, b1_, b2_, eps_;
  std::int64_t t_ = 0;
  ParameterSet m_, v_;
};

}  // namespace twsbench::nn
