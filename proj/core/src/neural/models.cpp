#include "twsbench/neural/models.hpp"

#include <cmath>

#include "twsbench/errors.hpp"
#include "twsbench/random.hpp"

namespace twsbench::nn {

std::string_view to_string(ModelKind k) { return k == ModelKind::Lstm ? "LSTM" : "TFT"; }

ModelKind parse_model_kind(std::string_view s) {
  if (s == "LSTM" || s == "lstm") return ModelKind::Lstm;
  if (s == "TFT" || s == "TFT-lite" || s == "tft") return ModelKind::TftLite;
  fail(ErrorKind::InvalidConfig, "unknown neural model '" + std::string(s) + "'");
}

void NeuralConfig::validate() const {
  if (input_size < 1 || static_size < 1 || hidden < 1 || outputs < 1)
    fail(ErrorKind::InvalidParams, "neural model sizes must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorKind::InvalidParams, "dropout must be in [0, 1)");
  if (kind == ModelKind::TftLite) {
    if (heads < 1 || hidden % heads != 0)
      fail(ErrorKind::InvalidParams, "hidden size " + std::to_string(hidden) + " is not divisible by " +
                                         std::to_string(heads) + " heads");
    if (input_size <= kTimeChannel)
      fail(ErrorKind::InvalidParams, "TFT-lite expects the trend channel at row " + std::to_string(kTimeChannel));
  }
}

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  if (p <= 0.0) return {};
  std::bernoulli_distribution keep(1.0 - p);
  Eigen::MatrixXd m(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = keep(rng) ? scale : 0.0;
  return m;
}

// ---- base ------------------------------------------------------------------

void NeuralModel::initialize(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x1417));
  params_.set_zero();
  init_params(rng);
  initialized_ = true;
}

void NeuralModel::check_batch(const Batch& batch) const {
  if (batch.steps.empty()) fail(ErrorKind::ShapeMismatch, "batch has no sequence steps");
  const Eigen::Index B = batch.size();
  if (batch.statics.rows() != config_.static_size)
    fail(ErrorKind::ShapeMismatch, "statics have " + std::to_string(batch.statics.rows()) + " rows, expected " +
                                       std::to_string(config_.static_size));
  for (const auto& s : batch.steps)
    if (s.rows() != config_.input_size || s.cols() != B)
      fail(ErrorKind::ShapeMismatch, "sequence step has shape " + std::to_string(s.rows()) + "x" +
                                         std::to_string(s.cols()) + ", expected " +
                                         std::to_string(config_.input_size) + "x" + std::to_string(B));
}

Eigen::MatrixXd NeuralModel::forward(const Batch& batch, Rng* dropout_rng) {
  check_batch(batch);
  auto cache = make_cache();
  Eigen::MatrixXd out = run(batch, dropout_rng, *cache);
  cache_ = std::move(cache);
  return out;
}

void NeuralModel::backward(const Eigen::MatrixXd& d_outputs, ParameterSet& grads) const {
  if (!cache_) fail(ErrorKind::UntrainedModel, "backward() called without a preceding forward()");
  run_backward(d_outputs, *cache_, grads);
}

Eigen::MatrixXd NeuralModel::predict(const Batch& batch) const {
  check_batch(batch);
  auto cache = make_cache();
  return run(batch, nullptr, *cache);
}

std::optional<Eigen::MatrixXd> NeuralModel::attention(const Batch&) const { return std::nullopt; }

std::unique_ptr<NeuralModel> NeuralModel::clone() const {
  auto c = clone_impl();
  c->cache_.reset();
  return c;
}

std::unique_ptr<NeuralModel> make_model(const NeuralConfig& config) {
  config.validate();
  if (config.kind == ModelKind::Lstm) return std::make_unique<LstmModel>(config);
  return std::make_unique<TftLiteModel>(config);
}

namespace {

Eigen::MatrixXd affine(const Eigen::MatrixXd& w, const Eigen::MatrixXd& b, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd y = w * x;
  y.colwise() += b.col(0);
  return y;
}

void affine_backward(const Eigen::MatrixXd& dy, const Eigen::MatrixXd& x, Eigen::MatrixXd& dw, Eigen::MatrixXd& db) {
  dw.noalias() += dy * x.transpose();
  db += dy.rowwise().sum();
}

}  // namespace

// ---- LSTM ------------------------------------------------------------------

struct LstmModel::Cache : CacheBase {
  Eigen::MatrixXd statics, h0;
  LstmLayer::Cache lstm;
  Eigen::MatrixXd mask, head_in;
};

LstmModel::LstmModel(NeuralConfig config) : NeuralModel(std::move(config)) {
  const auto& c = config_;
  c.validate();
  lstm_ = LstmLayer(params_, "lstm", c.input_size, c.hidden);
  static_w_ = params_.add("static.w", c.hidden, c.static_size);
  static_b_ = params_.add("static.b", c.hidden, 1);
  head_w_ = params_.add("head.w", c.outputs, c.hidden);
  head_b_ = params_.add("head.b", c.outputs, 1);
}

std::unique_ptr<NeuralModel::CacheBase> LstmModel::make_cache() const { return std::make_unique<Cache>(); }

void LstmModel::init_params(Rng& rng) {
  lstm_.init(params_, config_.init, rng);
  init_matrix(params_[static_w_], config_.init, rng);
  init_matrix(params_[head_w_], config_.init, rng);
}

Eigen::MatrixXd LstmModel::run(const Batch& batch, Rng* rng, CacheBase& base) const {
  auto& c = static_cast<Cache&>(base);
  c.statics = batch.statics;
  c.h0 = affine(params_[static_w_], params_[static_b_], batch.statics).array().tanh().matrix();
  lstm_.forward(params_, batch.steps, c.h0, c.lstm);
  c.head_in = c.lstm.h.back();
  if (rng && config_.dropout > 0.0) {
    c.mask = dropout_mask(c.head_in.rows(), c.head_in.cols(), config_.dropout, *rng);
    c.head_in = c.head_in.cwiseProduct(c.mask);
  }
  return affine(params_[head_w_], params_[head_b_], c.head_in);
}

void LstmModel::run_backward(const Eigen::MatrixXd& dy, const CacheBase& base, ParameterSet& grads) const {
  const auto& c = static_cast<const Cache&>(base);
  affine_backward(dy, c.head_in, grads[head_w_], grads[head_b_]);
  Eigen::MatrixXd dh = params_[head_w_].transpose() * dy;
  if (c.mask.size() > 0) dh = dh.cwiseProduct(c.mask);
  std::vector<Eigen::MatrixXd> dH(c.lstm.x.size());
  dH.back() = dh;
  std::vector<Eigen::MatrixXd> dx;
  Eigen::MatrixXd dh0;
  lstm_.backward(params_, grads, c.lstm, dH, dx, dh0);
  const Eigen::MatrixXd dpre = (dh0.array() * (1.0 - c.h0.array().square())).matrix();
  affine_backward(dpre, c.statics, grads[static_w_], grads[static_b_]);
}

// ---- TFT-lite --------------------------------------------------------------

struct TftLiteModel::Cache : CacheBase {
  std::vector<Eigen::MatrixXd> x_in;  // non-time channels per step
  std::vector<Eigen::MatrixXd> tau;   // 1 x B per step
  std::vector<Eigen::MatrixXd> e;     // embeddings
  Eigen::MatrixXd statics, h0;
  LstmLayer::Cache lstm;
  Eigen::MatrixXd q;
  std::vector<Eigen::MatrixXd> k, v;
  std::vector<Eigen::MatrixXd> attn;  // per head: L x B
  Eigen::MatrixXd ctx, a, p1, s1, p2, r, mask, rd, f1, z, u;
};

TftLiteModel::TftLiteModel(NeuralConfig config) : NeuralModel(std::move(config)) {
  const auto& c = config_;
  c.validate();
  const Eigen::Index d = c.hidden;
  embed_w_ = params_.add("embed.w", d, c.input_size - 1);
  embed_b_ = params_.add("embed.b", d, 1);
  time_w_ = params_.add("time.w", d, 1);
  time_b_ = params_.add("time.b", d, 1);
  static_w_ = params_.add("static.w", d, c.static_size);
  static_b_ = params_.add("static.b", d, 1);
  lstm_ = LstmLayer(params_, "lstm", d, d);
  wq_ = params_.add("attn.w_q", d, d);
  bq_ = params_.add("attn.b_q", d, 1);
  wk_ = params_.add("attn.w_k", d, d);
  bk_ = params_.add("attn.b_k", d, 1);
  wv_ = params_.add("attn.w_v", d, d);
  bv_ = params_.add("attn.b_v", d, 1);
  wo_ = params_.add("attn.w_o", d, d);
  bo_ = params_.add("attn.b_o", d, 1);
  g1w_ = params_.add("grn.w_g1", d, d);
  g1b_ = params_.add("grn.b_g1", d, 1);
  g2w_ = params_.add("grn.w_g2", d, d);
  g2b_ = params_.add("grn.b_g2", d, 1);
  f1w_ = params_.add("ff.w1", d, d);
  f1b_ = params_.add("ff.b1", d, 1);
  f2w_ = params_.add("ff.w2", d, d);
  f2b_ = params_.add("ff.b2", d, 1);
  head_w_ = params_.add("head.w", c.outputs, d);
  head_b_ = params_.add("head.b", c.outputs, 1);
}

std::unique_ptr<NeuralModel::CacheBase> TftLiteModel::make_cache() const { return std::make_unique<Cache>(); }

void TftLiteModel::init_params(Rng& rng) {
  for (auto idx : {embed_w_, time_w_, static_w_}) init_matrix(params_[idx], config_.init, rng);
  lstm_.init(params_, config_.init, rng);
  for (auto idx : {wq_, wk_, wv_, wo_, g1w_, g2w_, f1w_, f2w_, head_w_}) init_matrix(params_[idx], config_.init, rng);
}

Eigen::MatrixXd TftLiteModel::run(const Batch& batch, Rng* rng, CacheBase& base) const {
  auto& c = static_cast<Cache&>(base);
  const std::size_t L = batch.length();
  const Eigen::Index B = batch.size();
  const Eigen::Index d = config_.hidden;
  const Eigen::Index H = config_.heads;
  const Eigen::Index dh = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  c.x_in.resize(L);
  c.tau.resize(L);
  c.e.resize(L);
  for (std::size_t t = 0; t < L; ++t) {
    c.x_in[t] = batch.steps[t].topRows(kTimeChannel);
    c.e[t] = affine(params_[embed_w_], params_[embed_b_], c.x_in[t]);
    if (config_.use_time_index) {
      c.tau[t] = batch.steps[t].middleRows(kTimeChannel, 1);
      c.e[t] += affine(params_[time_w_], params_[time_b_], c.tau[t]);
    }
  }
  c.statics = batch.statics;
  c.h0 = affine(params_[static_w_], params_[static_b_], batch.statics).array().tanh().matrix();
  lstm_.forward(params_, c.e, c.h0, c.lstm);
  const Eigen::MatrixXd& hL = c.lstm.h.back();

  c.q = affine(params_[wq_], params_[bq_], hL);
  c.k.resize(L);
  c.v.resize(L);
  for (std::size_t t = 0; t < L; ++t) {
    c.k[t] = affine(params_[wk_], params_[bk_], c.lstm.h[t + 1]);
    c.v[t] = affine(params_[wv_], params_[bv_], c.lstm.h[t + 1]);
  }
  c.attn.assign(static_cast<std::size_t>(H), Eigen::MatrixXd(static_cast<Eigen::Index>(L), B));
  c.ctx = Eigen::MatrixXd::Zero(d, B);
  for (Eigen::Index j = 0; j < H; ++j) {
    auto& A = c.attn[static_cast<std::size_t>(j)];
    for (std::size_t t = 0; t < L; ++t)
      A.row(static_cast<Eigen::Index>(t)) =
          scale * c.q.middleRows(j * dh, dh).cwiseProduct(c.k[t].middleRows(j * dh, dh)).colwise().sum();
    const Eigen::RowVectorXd mx = A.colwise().maxCoeff();
    A = (A.rowwise() - mx).array().exp().matrix();
    const Eigen::RowVectorXd sum = A.colwise().sum();
    A = A.array().rowwise() / sum.array();
    for (std::size_t t = 0; t < L; ++t)
      c.ctx.middleRows(j * dh, dh).array() +=
          c.v[t].middleRows(j * dh, dh).array().rowwise() * A.row(static_cast<Eigen::Index>(t)).array();
  }
  c.a = affine(params_[wo_], params_[bo_], c.ctx);

  c.p1 = affine(params_[g1w_], params_[g1b_], c.a);
  c.s1 = sigmoid(c.p1);
  c.p2 = affine(params_[g2w_], params_[g2b_], c.a);
  c.r = hL + c.e.back() + c.s1.cwiseProduct(c.p2);

  c.rd = c.r;
  c.mask.resize(0, 0);
  if (rng && config_.dropout > 0.0) {
    c.mask = dropout_mask(d, B, config_.dropout, *rng);
    c.rd = c.r.cwiseProduct(c.mask);
  }
  c.f1 = affine(params_[f1w_], params_[f1b_], c.rd);
  c.z = c.f1.unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
  c.u = c.r + affine(params_[f2w_], params_[f2b_], c.z);
  return affine(params_[head_w_], params_[head_b_], c.u);
}

void TftLiteModel::run_backward(const Eigen::MatrixXd& dy, const CacheBase& base, ParameterSet& grads) const {
  const auto& c = static_cast<const Cache&>(base);
  const std::size_t L = c.e.size();
  const Eigen::Index B = dy.cols();
  const Eigen::Index d = config_.hidden;
  const Eigen::Index H = config_.heads;
  const Eigen::Index dh = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Eigen::MatrixXd& hL = c.lstm.h.back();

  affine_backward(dy, c.u, grads[head_w_], grads[head_b_]);
  const Eigen::MatrixXd du = params_[head_w_].transpose() * dy;

  Eigen::MatrixXd dr = du;
  affine_backward(du, c.z, grads[f2w_], grads[f2b_]);
  const Eigen::MatrixXd dz = params_[f2w_].transpose() * du;
  const Eigen::MatrixXd df1 =
      dz.cwiseProduct(c.f1.unaryExpr([](double x) { return x > 0.0 ? 1.0 : std::exp(x); }));
  affine_backward(df1, c.rd, grads[f1w_], grads[f1b_]);
  Eigen::MatrixXd drd = params_[f1w_].transpose() * df1;
  if (c.mask.size() > 0) drd = drd.cwiseProduct(c.mask);
  dr += drd;

  // r = hL + e_L + s1 * p2
  const Eigen::MatrixXd dp2 = dr.cwiseProduct(c.s1);
  const Eigen::MatrixXd dp1 = (dr.array() * c.p2.array() * c.s1.array() * (1.0 - c.s1.array())).matrix();
  affine_backward(dp1, c.a, grads[g1w_], grads[g1b_]);
  affine_backward(dp2, c.a, grads[g2w_], grads[g2b_]);
  const Eigen::MatrixXd da = params_[g1w_].transpose() * dp1 + params_[g2w_].transpose() * dp2;

  affine_backward(da, c.ctx, grads[wo_], grads[bo_]);
  const Eigen::MatrixXd dctx = params_[wo_].transpose() * da;

  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(d, B);
  std::vector<Eigen::MatrixXd> dk(L, Eigen::MatrixXd::Zero(d, B)), dv(L, Eigen::MatrixXd::Zero(d, B));
  for (Eigen::Index j = 0; j < H; ++j) {
    const auto& A = c.attn[static_cast<std::size_t>(j)];
    const auto dctx_j = dctx.middleRows(j * dh, dh);
    Eigen::MatrixXd dA(static_cast<Eigen::Index>(L), B);
    for (std::size_t t = 0; t < L; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      dv[t].middleRows(j * dh, dh) = dctx_j.array().rowwise() * A.row(ti).array();
      dA.row(ti) = dctx_j.cwiseProduct(c.v[t].middleRows(j * dh, dh)).colwise().sum();
    }
    const Eigen::RowVectorXd inner = A.cwiseProduct(dA).colwise().sum();
    const Eigen::MatrixXd dS = A.cwiseProduct(dA.rowwise() - inner) * scale;
    for (std::size_t t = 0; t < L; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      dq.middleRows(j * dh, dh) += (c.k[t].middleRows(j * dh, dh).array().rowwise() * dS.row(ti).array()).matrix();
      dk[t].middleRows(j * dh, dh) = c.q.middleRows(j * dh, dh).array().rowwise() * dS.row(ti).array();
    }
  }

  std::vector<Eigen::MatrixXd> dH(L);
  for (std::size_t t = 0; t < L; ++t) {
    affine_backward(dk[t], c.lstm.h[t + 1], grads[wk_], grads[bk_]);
    affine_backward(dv[t], c.lstm.h[t + 1], grads[wv_], grads[bv_]);
    dH[t] = params_[wk_].transpose() * dk[t] + params_[wv_].transpose() * dv[t];
  }
  affine_backward(dq, hL, grads[wq_], grads[bq_]);
  dH[L - 1] += params_[wq_].transpose() * dq + dr;

  std::vector<Eigen::MatrixXd> de;
  Eigen::MatrixXd dh0;
  lstm_.backward(params_, grads, c.lstm, dH, de, dh0);
  de[L - 1] += dr;

  for (std::size_t t = 0; t < L; ++t) {
    affine_backward(de[t], c.x_in[t], grads[embed_w_], grads[embed_b_]);
    if (config_.use_time_index) affine_backward(de[t], c.tau[t], grads[time_w_], grads[time_b_]);
  }
  const Eigen::MatrixXd dpre = (dh0.array() * (1.0 - c.h0.array().square())).matrix();
  affine_backward(dpre, c.statics, grads[static_w_], grads[static_b_]);
}

std::optional<Eigen::MatrixXd> TftLiteModel::attention(const Batch& batch) const {
  check_batch(batch);
  Cache c;
  run(batch, nullptr, c);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(batch.length()), batch.size());
  for (const auto& A : c.attn) mean += A;
  return mean / static_cast<double>(c.attn.size());
}

}  // namespace twsbench::nn
