#include "twsbench/neural/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "twsbench/errors.hpp"
#include "twsbench/random.hpp"

namespace twsbench::nn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorKind::InvalidParams, "learning rate must be positive");
  if (batch_size < 1) fail(ErrorKind::InvalidParams, "batch size must be positive");
  if (max_epochs < 1) fail(ErrorKind::InvalidParams, "max_epochs must be positive");
  if (patience < 1) fail(ErrorKind::InvalidParams, "patience must be at least 1");
  if (!(min_delta >= 0.0)) fail(ErrorKind::InvalidParams, "min_delta must be non-negative");
  validate_quantiles(quantiles);
}

double scaled_quantile_loss(const NeuralModel& model, const BatchSource& source, const QuantileLoss& loss,
                            std::size_t chunk) {
  const std::size_t N = source.size();
  double total = 0.0;
  for (std::size_t b = 0; b < N; b += chunk) {
    const std::size_t e = std::min(N, b + chunk);
    const Batch batch = source.range(b, e);
    total += loss.value(model.predict(batch), batch.targets) * static_cast<double>(e - b);
  }
  return 2.0 * total / static_cast<double>(N);
}

TrainResult train(NeuralModel& model, const BatchSource& train_set, const BatchSource& validation,
                  const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (train_set.size() == 0) fail(ErrorKind::EmptySplit, "training split has no examples");
  if (validation.size() == 0) fail(ErrorKind::EmptySplit, "validation split has no examples");
  if (model.config().outputs % static_cast<Eigen::Index>(config.quantiles.size()) != 0)
    fail(ErrorKind::ShapeMismatch, "model outputs are not a multiple of the quantile count");

  QuantileLoss loss{config.quantiles, {}};
  Adam adam(model.params(), config.learning_rate);
  Rng shuffle_rng(mix_seed(config.seed, 0x5f1e));
  Rng dropout_rng(mix_seed(config.seed, 0xd0d0));

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  ParameterSet grads = model.params().zeros_like();
  ParameterSet best = model.params();
  double best_val = std::numeric_limits<double>::infinity();
  double reference = std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  TrainResult result;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double train_total = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const Batch batch = train_set.gather(std::span(order).subspan(b, e - b));
      Eigen::MatrixXd d_out;
      const double l = loss.value_and_grad(model.forward(batch, &dropout_rng), batch.targets, d_out);
      if (!std::isfinite(l)) fail(ErrorKind::Divergence, "training loss became non-finite at epoch " + std::to_string(epoch));
      train_total += l * static_cast<double>(e - b);
      grads.set_zero();
      model.backward(d_out, grads);
      adam.step(model.params(), grads);
      if (!model.params().all_finite())
        fail(ErrorKind::Divergence, "parameters became non-finite at epoch " + std::to_string(epoch));
    }
    EpochRecord rec{epoch, 2.0 * train_total / static_cast<double>(order.size()),
                    scaled_quantile_loss(model, validation, loss, config.batch_size)};
    if (hooks.val_loss_override)
      if (auto v = hooks.val_loss_override(epoch, rec.val_loss)) rec.val_loss = *v;
    if (!std::isfinite(rec.val_loss))
      fail(ErrorKind::Divergence, "validation loss became non-finite at epoch " + std::to_string(epoch));
    result.history.push_back(rec);

    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      best = model.params();
      result.best_epoch = epoch;
    }
    if (rec.val_loss < reference - config.min_delta) {
      reference = rec.val_loss;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (hooks.on_epoch_end) hooks.on_epoch_end(rec, model);
    if (since_improvement >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  model.params() = best;
  return result;
}

TrainedNeural fit_neural(const NeuralConfig& model_config, const TrainConfig& config, const BatchSource& train_set,
                         const BatchSource& validation, const TrainHooks& hooks) {
  TrainedNeural out;
  out.model = make_model(model_config);
  out.model->initialize(config.seed);
  out.result = train(*out.model, train_set, validation, config, hooks);
  return out;
}

Eigen::Index point_row(const std::vector<double>& quantiles, int lead) {
  const auto it = std::find(quantiles.begin(), quantiles.end(), 0.5);
  const auto k = it != quantiles.end() ? static_cast<Eigen::Index>(it - quantiles.begin())
                                       : static_cast<Eigen::Index>(quantiles.size() / 2);
  return static_cast<Eigen::Index>(lead - 1) * static_cast<Eigen::Index>(quantiles.size()) + k;
}

}  // namespace twsbench::nn
