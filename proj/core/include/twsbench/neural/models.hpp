#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twsbench/neural/lstm_layer.hpp"
#include "twsbench/neural/parameters.hpp"

namespace twsbench::nn {

/// A mini-batch: one channels x B matrix per sequence step, statics 11 x B, targets H x B.
struct Batch {
  std::vector<Eigen::MatrixXd> steps;
  Eigen::MatrixXd statics;
  Eigen::MatrixXd targets;

  Eigen::Index size() const { return statics.cols(); }
  std::size_t length() const { return steps.size(); }
};

enum class ModelKind { Lstm, TftLite };
std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

// Row of the standardized trend in each sequence step.
inline constexpr Eigen::Index kTimeChannel = 15;

struct NeuralConfig {
  ModelKind kind = ModelKind::Lstm;
  Eigen::Index input_size = 16;
  Eigen::Index static_size = 11;
  Eigen::Index hidden = 32;
  Eigen::Index heads = 4;   // TFT-lite only
  Eigen::Index outputs = 1; // H * |quantiles|
  double dropout = 0.0;
  bool use_time_index = true;  // TFT-lite only
  InitScheme init = InitScheme::Xavier;

  void validate() const;
};

class NeuralModel {
 public:
  virtual ~NeuralModel() = default;

  const NeuralConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  void initialize(std::uint64_t seed);
  // Set by initialize() and by checkpoint loading.
  bool initialized() const { return initialized_; }
  void mark_initialized() { initialized_ = true; }

  // Training-mode forward when `dropout_rng` is set; caches state for backward().
  Eigen::MatrixXd forward(const Batch& batch, Rng* dropout_rng);
  // Accumulates dLoss/dparams for the last forward() into `grads`.
  void backward(const Eigen::MatrixXd& d_outputs, ParameterSet& grads) const;
  // Inference mode, no shared state: safe to call concurrently.
  Eigen::MatrixXd predict(const Batch& batch) const;
  // Per-step attention averaged over heads (L x B), or nullopt for models without attention.
  virtual std::optional<Eigen::MatrixXd> attention(const Batch& batch) const;

  std::unique_ptr<NeuralModel> clone() const;

 protected:
  struct CacheBase {
    virtual ~CacheBase() = default;
  };

  explicit NeuralModel(NeuralConfig config) : config_(std::move(config)) {}
  virtual std::unique_ptr<CacheBase> make_cache() const = 0;
  virtual Eigen::MatrixXd run(const Batch& batch, Rng* dropout_rng, CacheBase& cache) const = 0;
  virtual void run_backward(const Eigen::MatrixXd& d_outputs, const CacheBase& cache, ParameterSet& grads) const = 0;
  virtual void init_params(Rng& rng) = 0;
  virtual std::unique_ptr<NeuralModel> clone_impl() const = 0;

  void check_batch(const Batch& batch) const;

  NeuralConfig config_;
  ParameterSet params_;
  std::shared_ptr<CacheBase> cache_;
  bool initialized_ = false;
};

class LstmModel final : public NeuralModel {
 public:
  explicit LstmModel(NeuralConfig config);

 private:
  struct Cache;
  std::unique_ptr<CacheBase> make_cache() const override;
  Eigen::MatrixXd run(const Batch& batch, Rng* dropout_rng, CacheBase& cache) const override;
  void run_backward(const Eigen::MatrixXd& d_outputs, const CacheBase& cache, ParameterSet& grads) const override;
  void init_params(Rng& rng) override;
  std::unique_ptr<NeuralModel> clone_impl() const override { return std::make_unique<LstmModel>(*this); }

  LstmLayer lstm_;
  std::size_t static_w_, static_b_, head_w_, head_b_;
};

/// Embedding -> LSTM encoder (static-initialized state) -> multi-head attention with the final
/// step as query -> gated residual -> feed-forward -> quantile head. Channel 15 (trend) feeds an
/// additive time embedding only when use_time_index is set.
class TftLiteModel final : public NeuralModel {
 public:
  explicit TftLiteModel(NeuralConfig config);
  std::optional<Eigen::MatrixXd> attention(const Batch& batch) const override;

 private:
  struct Cache;
  std::unique_ptr<CacheBase> make_cache() const override;
  Eigen::MatrixXd run(const Batch& batch, Rng* dropout_rng, CacheBase& cache) const override;
  void run_backward(const Eigen::MatrixXd& d_outputs, const CacheBase& cache, ParameterSet& grads) const override;
  void init_params(Rng& rng) override;
  std::unique_ptr<NeuralModel> clone_impl() const override { return std::make_unique<TftLiteModel>(*this); }

  LstmLayer lstm_;
  std::size_t embed_w_, embed_b_, time_w_, time_b_, static_w_, static_b_;
  std::size_t wq_, bq_, wk_, bk_, wv_, bv_, wo_, bo_;
  std::size_t g1w_, g1b_, g2w_, g2b_, f1w_, f1b_, f2w_, f2b_, head_w_, head_b_;
};

std::unique_ptr<NeuralModel> make_model(const NeuralConfig& config);

// Inverted dropout mask (values 0 or 1/(1-p)); empty when p == 0.
Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng);

}  // namespace twsbench::nn
