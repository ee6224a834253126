#include "twsbench/attribution.hpp"

#include "twsbench/errors.hpp"
#include "twsbench/neural/batch.hpp"
#include "twsbench/neural/trainer.hpp"

namespace twsbench {

namespace {

constexpr std::size_t kChunk = 256;

void require_ready(const nn::NeuralModel& model) {
  if (!model.initialized()) fail(ErrorKind::UntrainedModel, "attribution requires a trained model");
}

}  // namespace

AttributionReport occlusion_importance(const nn::NeuralModel& model, const SupervisedSet& set, Split split,
                                       const std::vector<double>& quantiles, const std::string& model_name) {
  require_ready(model);
  const auto L = static_cast<std::size_t>(set.task().sequence_length);
  const Eigen::Index row = nn::point_row(quantiles, 1);
  AttributionReport rep{model_name, set.task().sequence_length, std::vector<double>(L, 0.0)};
  std::size_t basins_used = 0;
  for (std::size_t b = 0; b < set.basin_count(); ++b) {
    const nn::SupervisedBatchSource src(set, set.examples(split, b));
    if (src.size() == 0) continue;
    std::vector<double> basin_sum(L, 0.0);
    for (std::size_t s0 = 0; s0 < src.size(); s0 += kChunk) {
      nn::Batch batch = src.range(s0, std::min(src.size(), s0 + kChunk));
      const Eigen::RowVectorXd base = model.predict(batch).row(row);
      for (std::size_t s = 0; s < L; ++s) {
        const Eigen::MatrixXd saved = batch.steps[s].topRows(kDynamicChannels);
        batch.steps[s].topRows(kDynamicChannels).setZero();
        basin_sum[s] += (model.predict(batch).row(row) - base).cwiseAbs().sum();
        batch.steps[s].topRows(kDynamicChannels) = saved;
      }
    }
    for (std::size_t s = 0; s < L; ++s) rep.importance[s] += basin_sum[s] / static_cast<double>(src.size());
    ++basins_used;
  }
  if (basins_used == 0) fail(ErrorKind::EmptySplit, "no examples to attribute in the requested split");
  for (auto& v : rep.importance) v /= static_cast<double>(basins_used);
  return rep;
}

AttributionReport mean_attention(const nn::NeuralModel& model, const SupervisedSet& set, Split split,
                                 const std::string& model_name) {
  require_ready(model);
  const auto L = static_cast<std::size_t>(set.task().sequence_length);
  const nn::SupervisedBatchSource src(set, set.examples(split));
  if (src.size() == 0) fail(ErrorKind::EmptySplit, "no examples to attribute in the requested split");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(L));
  for (std::size_t s0 = 0; s0 < src.size(); s0 += kChunk) {
    const auto att = model.attention(src.range(s0, std::min(src.size(), s0 + kChunk)));
    if (!att) fail(ErrorKind::InvalidConfig, "model " + model_name + " has no attention weights");
    sum += att->rowwise().sum();
  }
  sum /= static_cast<double>(src.size());
  sum /= sum.sum();
  return {model_name, set.task().sequence_length, std::vector<double>(sum.data(), sum.data() + sum.size())};
}

}  // namespace twsbench
