#include "twsbench/neural/batch.hpp"

#include <numeric>

namespace twsbench::nn {

Batch BatchSource::range(std::size_t begin, std::size_t end) const {
  std::vector<std::size_t> rows(end - begin);
  std::iota(rows.begin(), rows.end(), begin);
  return gather(rows);
}

SupervisedBatchSource::SupervisedBatchSource(const SupervisedSet& set, std::vector<ExampleRef> refs)
    : set_(&set), refs_(std::move(refs)) {}

Batch SupervisedBatchSource::gather(std::span<const std::size_t> rows) const {
  const auto B = static_cast<Eigen::Index>(rows.size());
  const auto L = static_cast<std::size_t>(set_->task().sequence_length);
  const auto H = static_cast<Eigen::Index>(set_->task().n_targets());
  Batch b;
  b.steps.assign(L, Eigen::MatrixXd(static_cast<Eigen::Index>(kSequenceChannels), B));
  b.statics.resize(static_cast<Eigen::Index>(kStaticFeatures), B);
  b.targets.resize(H, B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const auto& ref = refs_[rows[static_cast<std::size_t>(j)]];
    const Eigen::MatrixXd seq = set_->sequence_features(ref);
    for (std::size_t t = 0; t < L; ++t) b.steps[t].col(j) = seq.row(static_cast<Eigen::Index>(t)).transpose();
    b.statics.col(j) = set_->static_features(ref);
    b.targets.col(j) = set_->targets(ref);
  }
  return b;
}

Batch InMemoryBatchSource::gather(std::span<const std::size_t> rows) const {
  const auto B = static_cast<Eigen::Index>(rows.size());
  Batch b;
  b.steps.reserve(all_.steps.size());
  for (const auto& s : all_.steps) {
    Eigen::MatrixXd m(s.rows(), B);
    for (Eigen::Index j = 0; j < B; ++j) m.col(j) = s.col(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(j)]));
    b.steps.push_back(std::move(m));
  }
  b.statics.resize(all_.statics.rows(), B);
  b.targets.resize(all_.targets.rows(), B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(j)]);
    b.statics.col(j) = all_.statics.col(r);
    if (all_.targets.size() > 0) b.targets.col(j) = all_.targets.col(r);
  }
  return b;
}

Eigen::MatrixXd predict_all(const NeuralModel& model, const BatchSource& source, std::size_t chunk) {
  const std::size_t N = source.size();
  Eigen::MatrixXd out(model.config().outputs, static_cast<Eigen::Index>(N));
  for (std::size_t b = 0; b < N; b += chunk) {
    const std::size_t e = std::min(N, b + chunk);
    out.middleCols(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(e - b)) = model.predict(source.range(b, e));
  }
  return out;
}

}  // namespace twsbench::nn
