#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "twsbench/errors.hpp"
#include "twsbench/neural/checkpoint.hpp"
#include "twsbench/neural/gradcheck.hpp"
#include "twsbench/neural/loss.hpp"
#include "twsbench/neural/models.hpp"

using namespace twsbench;
using namespace twsbench::nn;

namespace {

Batch random_batch(Eigen::Index B, std::size_t L, Eigen::Index H, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  auto fill = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
    return m;
  };
  Batch b;
  for (std::size_t t = 0; t < L; ++t) b.steps.push_back(fill(16, B));
  b.statics = fill(11, B);
  b.targets = fill(H, B);
  return b;
}

NeuralConfig small_config(ModelKind kind, Eigen::Index outputs = 1) {
  NeuralConfig c;
  c.kind = kind;
  c.hidden = 8;
  c.heads = 2;
  c.outputs = outputs;
  return c;
}

}  // namespace

TEST(Pinball, WorkedExamples) {
  EXPECT_DOUBLE_EQ(pinball(10.0, 8.0, 0.1), 0.2);
  EXPECT_DOUBLE_EQ(pinball(10.0, 8.0, 0.9), 1.8);
  EXPECT_DOUBLE_EQ(pinball(8.0, 10.0, 0.1), 1.8);
  EXPECT_DOUBLE_EQ(pinball(8.0, 10.0, 0.9), 0.2);
  EXPECT_EQ(pinball(3.0, 3.0, 0.5), 0.0);
  const std::vector<double> y{0.0, 0.0}, yh{2.0, -2.0};
  EXPECT_DOUBLE_EQ(median_loss(y, yh), 2.0);
}

TEST(Pinball, ConstantMinimizerIsTheEmpiricalQuantile) {
  std::mt19937_64 rng(4);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> y(999);
  for (auto& v : y) v = ex(rng);
  auto sorted = y;
  std::sort(sorted.begin(), sorted.end());
  for (double q : {0.1, 0.5, 0.9}) {
    auto total = [&](double c) {
      double s = 0.0;
      for (double v : y) s += pinball(v, c, q);
      return s;
    };
    const double target = sorted[static_cast<std::size_t>(q * 998.0 + 0.5)];
    for (double d : {0.05, 0.2, -0.05, -0.2}) EXPECT_LT(total(target), total(target + d)) << q;
  }
}

TEST(QuantileLossFn, LayoutAndMask) {
  QuantileLoss loss{{0.1, 0.5, 0.9}, {true, false, true}};
  const Eigen::MatrixXd out = Eigen::MatrixXd::Random(6, 4);
  const Eigen::MatrixXd tgt = Eigen::MatrixXd::Random(2, 4);
  Eigen::MatrixXd grad;
  const double v = loss.value_and_grad(out, tgt, grad);
  EXPECT_DOUBLE_EQ(v, loss.value(out, tgt));
  ASSERT_EQ(grad.rows(), 6);
  EXPECT_TRUE(grad.row(1).isZero(0.0));
  EXPECT_TRUE(grad.row(4).isZero(0.0));
  EXPECT_FALSE(grad.row(0).isZero(0.0));
  double manual = 0.0;
  for (Eigen::Index b = 0; b < 4; ++b)
    for (Eigen::Index h = 0; h < 2; ++h)
      manual += pinball(tgt(h, b), out(h * 3, b), 0.1) + pinball(tgt(h, b), out(h * 3 + 2, b), 0.9);
  EXPECT_NEAR(v, manual / 16.0, 1e-14);
  EXPECT_THROW(validate_quantiles({0.5, 1.0}), Error);
}

TEST(Models, OutputShapes) {
  for (auto kind : {ModelKind::Lstm, ModelKind::TftLite}) {
    auto m = make_model(small_config(kind, 6));
    m->initialize(1);
    const auto y = m->predict(random_batch(5, 7, 2, 2));
    EXPECT_EQ(y.rows(), 6);
    EXPECT_EQ(y.cols(), 5);
    EXPECT_TRUE(y.allFinite());
  }
}

TEST(Models, ZeroWeightsGiveHeadBias) {
  for (auto kind : {ModelKind::Lstm, ModelKind::TftLite}) {
    auto m = make_model(small_config(kind, 3));
    m->initialize(1);
    m->params().set_zero();
    m->params().at("head.b") << 0.25, -1.0, 3.0;
    const auto y = m->predict(random_batch(4, 6, 1, 3));
    for (Eigen::Index b = 0; b < 4; ++b) {
      EXPECT_NEAR(y(0, b), 0.25, 1e-15);
      EXPECT_NEAR(y(1, b), -1.0, 1e-15);
      EXPECT_NEAR(y(2, b), 3.0, 1e-15);
    }
  }
}

TEST(Models, InferenceIsDeterministic) {
  for (auto kind : {ModelKind::Lstm, ModelKind::TftLite}) {
    auto cfg = small_config(kind);
    cfg.dropout = 0.3;
    auto a = make_model(cfg), b = make_model(cfg);
    a->initialize(9);
    b->initialize(9);
    EXPECT_TRUE(a->params() == b->params());
    const auto batch = random_batch(6, 5, 1, 4);
    EXPECT_TRUE(a->predict(batch) == a->predict(batch));
    EXPECT_TRUE(a->predict(batch) == b->predict(batch));
  }
}

TEST(Models, TimeIndexSwitch) {
  auto cfg = small_config(ModelKind::TftLite);
  auto batch = random_batch(5, 8, 1, 5);
  auto shifted = batch;
  for (auto& s : shifted.steps) s.row(kTimeChannel).array() += 1000.0;

  cfg.use_time_index = false;
  auto without = make_model(cfg);
  without->initialize(3);
  EXPECT_TRUE(without->predict(batch) == without->predict(shifted));

  cfg.use_time_index = true;
  auto with = make_model(cfg);
  with->initialize(3);
  EXPECT_FALSE(with->predict(batch) == with->predict(shifted));
}

TEST(Attention, UniformWhenKeysAgree) {
  auto m = make_model(small_config(ModelKind::TftLite));
  m->initialize(1);
  m->params().set_zero();
  const auto a = m->attention(random_batch(3, 10, 1, 6));
  ASSERT_TRUE(a);
  EXPECT_TRUE(a->isApprox(Eigen::MatrixXd::Constant(10, 3, 0.1), 1e-14));
}

TEST(Attention, RowsFormDistributions) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto cfg = small_config(ModelKind::TftLite);
    auto m = make_model(cfg);
    m->initialize(seed);
    const auto a = *m->attention(random_batch(4, 12, 1, 1000 + seed));
    EXPECT_GE(a.minCoeff(), 0.0);
    for (Eigen::Index b = 0; b < a.cols(); ++b) EXPECT_NEAR(a.col(b).sum(), 1.0, 1e-6);
  }
  auto lstm = make_model(small_config(ModelKind::Lstm));
  lstm->initialize(0);
  EXPECT_FALSE(lstm->attention(random_batch(2, 3, 1, 0)));
}

TEST(GradientCheck, AllTensorsAgreeWithFiniteDifferences) {
  for (auto kind : {ModelKind::Lstm, ModelKind::TftLite}) {
    auto m = make_model(small_config(kind, 6));
    m->initialize(11);
    const QuantileLoss loss{{0.1, 0.5, 0.9}, {}};
    const auto checks = gradient_check(*m, random_batch(3, 5, 2, 12), loss);
    EXPECT_EQ(checks.size(), m->params().size());
    for (const auto& c : checks) EXPECT_LE(c.relative_error, 1e-4) << to_string(kind) << " " << c.name;
  }
}

TEST(GradientCheck, InactiveQuantileRowGetsNoGradient) {
  auto m = make_model(small_config(ModelKind::Lstm, 3));
  m->initialize(2);
  const auto batch = random_batch(4, 5, 1, 13);
  const QuantileLoss loss{{0.1, 0.5, 0.9}, {true, false, true}};
  const Eigen::MatrixXd y = m->forward(batch, nullptr);
  Eigen::MatrixXd dy;
  loss.value_and_grad(y, batch.targets, dy);
  auto grads = m->params().zeros_like();
  m->backward(dy, grads);
  EXPECT_TRUE(grads.at("head.w").row(1).isZero(0.0));
  EXPECT_EQ(grads.at("head.b")(1, 0), 0.0);
  EXPECT_FALSE(grads.at("head.w").row(0).isZero(0.0));
}

TEST(Init, OrthogonalAndXavier) {
  Rng rng(5);
  Eigen::MatrixXd sq(8, 8), tall(12, 4), wide(4, 12);
  orthogonal(sq, rng);
  orthogonal(tall, rng);
  orthogonal(wide, rng);
  EXPECT_TRUE((sq.transpose() * sq).isIdentity(1e-12));
  EXPECT_TRUE((tall.transpose() * tall).isIdentity(1e-12));
  EXPECT_TRUE((wide * wide.transpose()).isIdentity(1e-12));

  Eigen::MatrixXd w(30, 50);
  xavier_uniform(w, rng);
  const double bound = std::sqrt(6.0 / 80.0);
  EXPECT_LE(w.cwiseAbs().maxCoeff(), bound);
  EXPECT_GT(w.cwiseAbs().maxCoeff(), 0.9 * bound);
}

TEST(Init, ForgetGateBiasIsOne) {
  for (auto scheme : {InitScheme::Xavier, InitScheme::Orthogonal}) {
    auto cfg = small_config(ModelKind::Lstm);
    cfg.init = scheme;
    auto m = make_model(cfg);
    m->initialize(0);
    const auto& b = m->params().at("lstm.b");
    EXPECT_TRUE(b.middleRows(8, 8).isOnes(0.0));
    EXPECT_TRUE(b.topRows(8).isZero(0.0));
    EXPECT_TRUE(b.bottomRows(16).isZero(0.0));
  }
}

TEST(Init, UnknownSchemeRejected) {
  try {
    parse_init_scheme("he");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownScheme);
  }
  EXPECT_EQ(parse_init_scheme("orthogonal"), InitScheme::Orthogonal);
}

TEST(Config, InvalidShapesRejected) {
  auto cfg = small_config(ModelKind::TftLite);
  cfg.heads = 3;
  EXPECT_THROW(make_model(cfg), Error);
  cfg = small_config(ModelKind::Lstm);
  cfg.dropout = 1.0;
  EXPECT_THROW(make_model(cfg), Error);
  auto m = make_model(small_config(ModelKind::Lstm));
  m->initialize(0);
  auto bad = random_batch(2, 3, 1, 0);
  bad.statics.conservativeResize(10, Eigen::NoChange);
  EXPECT_THROW(m->predict(bad), Error);
}

TEST(Checkpoint, RoundTripPredictsIdentically) {
  for (auto kind : {ModelKind::Lstm, ModelKind::TftLite}) {
    auto cfg = small_config(kind, 3);
    cfg.use_time_index = kind == ModelKind::Lstm;
    auto m = make_model(cfg);
    m->initialize(21);
    const auto back = model_from_checkpoint_json(checkpoint_json(*m));
    EXPECT_TRUE(back->params() == m->params());
    EXPECT_EQ(back->config().use_time_index, cfg.use_time_index);
    const auto batch = random_batch(3, 6, 1, 22);
    EXPECT_TRUE(back->predict(batch) == m->predict(batch));
  }
  EXPECT_THROW(model_from_checkpoint_json("{\"config\": {}}"), Error);
}
