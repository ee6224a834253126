#include <benchmark/benchmark.h>

#include <random>

#include "twsbench/features.hpp"
#include "twsbench/linear.hpp"
#include "twsbench/metrics.hpp"
#include "twsbench/neural/loss.hpp"
#include "twsbench/neural/models.hpp"
#include "twsbench/stats.hpp"
#include "twsbench/synthetic.hpp"
#include "twsbench/trees.hpp"

using namespace twsbench;

namespace {

Eigen::MatrixXd normal(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
  return m;
}

// One basin's training design: 144 rows of 60 features.
void BM_OlsSingleBasin(benchmark::State& state) {
  const auto X = normal(144, 60, 1);
  const Eigen::VectorXd y = normal(144, 1, 2).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_ols(X, y));
}
BENCHMARK(BM_OlsSingleBasin);

void BM_OlsPooled(benchmark::State& state) {
  const auto X = normal(state.range(0), 60, 3);
  const Eigen::VectorXd y = normal(state.range(0), 1, 4).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_ols(X, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OlsPooled)->Arg(2304)->Arg(55620)->Unit(benchmark::kMillisecond);

void BM_TreeFit(benchmark::State& state) {
  const auto X = normal(144, 60, 5);
  const Eigen::VectorXd y = normal(144, 1, 6).col(0);
  TreeParams p;
  p.max_depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_tree(X, y, p));
}
BENCHMARK(BM_TreeFit)->Arg(5)->Arg(10);

void BM_BoostedFit(benchmark::State& state) {
  const auto X = normal(144, 60, 7);
  const Eigen::VectorXd y = normal(144, 1, 8).col(0);
  BoostParams p;
  p.n_estimators = 100;
  p.num_leaves = 20;
  for (auto _ : state) benchmark::DoNotOptimize(fit_boosted(X, y, p, 0));
}
BENCHMARK(BM_BoostedFit)->Unit(benchmark::kMillisecond);

void neural_step(benchmark::State& state, nn::ModelKind kind) {
  nn::NeuralConfig cfg;
  cfg.kind = kind;
  cfg.hidden = 32;
  cfg.heads = 4;
  auto model = nn::make_model(cfg);
  model->initialize(0);
  const Eigen::Index B = state.range(0);
  nn::Batch batch;
  for (int t = 0; t < 12; ++t) batch.steps.push_back(normal(16, B, 10 + t));
  batch.statics = normal(11, B, 30);
  batch.targets = normal(1, B, 31);
  const nn::QuantileLoss loss;
  auto grads = model->params().zeros_like();
  nn::Rng rng(1);
  for (auto _ : state) {
    Eigen::MatrixXd d;
    loss.value_and_grad(model->forward(batch, &rng), batch.targets, d);
    grads.set_zero();
    model->backward(d, grads);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * B);
}

void BM_LstmTrainStep(benchmark::State& state) { neural_step(state, nn::ModelKind::Lstm); }
void BM_TftTrainStep(benchmark::State& state) { neural_step(state, nn::ModelKind::TftLite); }
BENCHMARK(BM_LstmTrainStep)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TftTrainStep)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  std::vector<double> t(60), p(60);
  for (auto& v : t) v = 100 + n01(rng);
  for (auto& v : p) v = 100 + n01(rng);
  for (auto _ : state) benchmark::DoNotOptimize(compute_metrics(t, p));
}
BENCHMARK(BM_Metrics);

void BM_MannWhitneyExact(benchmark::State& state) {
  std::vector<double> a{0.1, 0.5, 0.9, 1.3, 2.0, 0.7, 0.2, 1.1}, b{0.3, 0.8, 1.5, 2.2, 0.4, 1.9, 1.0, 0.6};
  for (auto _ : state) benchmark::DoNotOptimize(mann_whitney_u(a, b, Alternative::Less));
}
BENCHMARK(BM_MannWhitneyExact);

void BM_AssembleDesk(benchmark::State& state) {
  const auto series = generate_synthetic(SyntheticConfig::ol_like(16, 42));
  for (auto _ : state) {
    const auto set = assemble_supervised(prepare_basins(series, {}), TaskSpec::regression(12));
    benchmark::DoNotOptimize(set.design_matrix(Split::Train));
  }
}
BENCHMARK(BM_AssembleDesk)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
