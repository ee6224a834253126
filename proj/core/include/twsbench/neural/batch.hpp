#pragma once

#include <span>
#include <vector>

#include "twsbench/features.hpp"
#include "twsbench/neural/models.hpp"

namespace twsbench::nn {

/// Random-access examples that are assembled into batches on demand.
class BatchSource {
 public:
  virtual ~BatchSource() = default;
  virtual std::size_t size() const = 0;
  virtual Batch gather(std::span<const std::size_t> rows) const = 0;

  Batch range(std::size_t begin, std::size_t end) const;
};

// Examples drawn from a supervised set; the set must outlive the source.
class SupervisedBatchSource final : public BatchSource {
 public:
  SupervisedBatchSource(const SupervisedSet& set, std::vector<ExampleRef> refs);
  std::size_t size() const override { return refs_.size(); }
  Batch gather(std::span<const std::size_t> rows) const override;
  const std::vector<ExampleRef>& refs() const { return refs_; }

 private:
  const SupervisedSet* set_;
  std::vector<ExampleRef> refs_;
};

// Columns of a fully materialized batch.
class InMemoryBatchSource final : public BatchSource {
 public:
  explicit InMemoryBatchSource(Batch all) : all_(std::move(all)) {}
  std::size_t size() const override { return static_cast<std::size_t>(all_.size()); }
  Batch gather(std::span<const std::size_t> rows) const override;

 private:
  Batch all_;
};

// Predictions for every example, in chunks of `chunk` examples. outputs x N.
Eigen::MatrixXd predict_all(const NeuralModel& model, const BatchSource& source, std::size_t chunk = 256);

}  // namespace twsbench::nn
