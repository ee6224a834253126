#include "twsbench/features.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "twsbench/errors.hpp"

namespace twsbench {

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::Regression: return "regression";
    case TaskKind::Forecast: return "forecast";
    case TaskKind::DailySmoothed: return "daily_smoothed";
  }
  return "?";
}

void TaskSpec::validate(Resolution resolution) const {
  if (sequence_length < 1) fail(ErrorKind::InvalidConfig, "sequence length must be >= 1");
  if (kind == TaskKind::Forecast && horizon < 1) fail(ErrorKind::InvalidConfig, "forecast horizon must be >= 1");
  if (kind == TaskKind::DailySmoothed) {
    if (smoothing_window < 1) fail(ErrorKind::InvalidConfig, "smoothing window must be >= 1");
    if (daily_stride < 1) fail(ErrorKind::InvalidConfig, "daily stride must be >= 1");
    if (resolution != Resolution::Daily)
      fail(ErrorKind::ResolutionMismatch, "daily-smoothed task requires daily data");
  }
}

TaskSpec TaskSpec::regression(int sequence_length) {
  TaskSpec t;
  t.sequence_length = sequence_length;
  return t;
}

TaskSpec TaskSpec::forecast(int sequence_length, int horizon) {
  TaskSpec t;
  t.kind = TaskKind::Forecast;
  t.sequence_length = sequence_length;
  t.horizon = horizon;
  return t;
}

TaskSpec TaskSpec::daily_smoothed(int sequence_length, int window, int stride) {
  TaskSpec t;
  t.kind = TaskKind::DailySmoothed;
  t.sequence_length = sequence_length;
  t.smoothing_window = window;
  t.daily_stride = stride;
  return t;
}

namespace {

std::vector<double> lag_window(const Eigen::MatrixXd& dynamic, std::size_t t, int L) {
  if (L < 1) fail(ErrorKind::InvalidConfig, "sequence length must be >= 1");
  if (t < static_cast<std::size_t>(L))
    fail(ErrorKind::InsufficientHistory,
         "target index " + std::to_string(t) + " has fewer than " + std::to_string(L) + " past steps");
  if (t > static_cast<std::size_t>(dynamic.rows()))
    fail(ErrorKind::OutOfRange, "target index beyond series");
  std::vector<double> out;
  out.reserve(kDynamicChannels * static_cast<std::size_t>(L));
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(kDynamicChannels); ++c)
    for (std::size_t s = t - static_cast<std::size_t>(L); s < t; ++s) out.push_back(dynamic(static_cast<Eigen::Index>(s), c));
  return out;
}

}  // namespace

std::vector<double> build_lag_window(const BasinSeries& series, std::size_t t, int sequence_length) {
  return lag_window(series.dynamic, t, sequence_length);
}

std::array<double, kMonthDummies> month_dummies(unsigned month) {
  if (month < 1 || month > 12) fail(ErrorKind::OutOfRange, "month must be in 1..12");
  std::array<double, kMonthDummies> d{};
  if (month >= 2) d[month - 2] = 1.0;
  return d;
}

std::int64_t trend_index(const Date& d, const Date& epoch, Resolution resolution) {
  return steps_between(epoch, d, resolution);
}

SmoothedTarget smooth_target(std::span<const double> raw, int window) {
  if (window < 1) fail(ErrorKind::InvalidConfig, "smoothing window must be >= 1");
  const auto k = static_cast<std::size_t>(window);
  if (k > raw.size())
    fail(ErrorKind::WindowTooLarge,
         "window " + std::to_string(k) + " exceeds series length " + std::to_string(raw.size()));
  SmoothedTarget out;
  out.first = k - 1;
  out.values.reserve(raw.size() - k + 1);
  for (std::size_t t = k - 1; t < raw.size(); ++t) {
    // direct summation per window keeps every value independent of earlier rounding
    double sum = 0.0;
    for (std::size_t s = t + 1 - k; s <= t; ++s) sum += raw[s];
    out.values.push_back(sum / static_cast<double>(k));
  }
  return out;
}

std::vector<std::string> flat_feature_names(int L) {
  std::vector<std::string> names;
  for (auto ch : kDynamicNames)
    for (int lag = L; lag >= 1; --lag) names.push_back(std::string(ch) + "_lag" + std::to_string(lag));
  for (unsigned m = 2; m <= 12; ++m) names.push_back((m < 10 ? "month_0" : "month_") + std::to_string(m));
  names.push_back("trend");
  return names;
}

std::vector<std::string> sequence_channel_names() {
  std::vector<std::string> names;
  for (auto ch : kDynamicNames) names.emplace_back(ch);
  for (unsigned m = 2; m <= 12; ++m) names.push_back((m < 10 ? "month_0" : "month_") + std::to_string(m));
  names.push_back("trend");
  return names;
}

// ---- preparation -----------------------------------------------------------

std::shared_ptr<const PreparedData> prepare_basins(const std::vector<BasinSeries>& series,
                                                   const PrepareOptions& options) {
  if (series.empty()) fail(ErrorKind::EmptyInput, "no basins to prepare");
  options.split.validate();
  auto data = std::make_shared<PreparedData>();
  data->options = options;
  data->resolution = series.front().axis.resolution();

  std::vector<SplitViews> views;
  views.reserve(series.size());
  for (const auto& s : series) {
    s.validate();
    if (s.axis.resolution() != data->resolution)
      fail(ErrorKind::ResolutionMismatch, "basins mix monthly and daily resolution");
    views.push_back(split_series(s, options.split));
  }
  // global epoch: first training timestamp of the pooled dataset
  Date epoch = views.front().train.first_date();
  for (const auto& v : views) epoch = std::min(epoch, v.train.first_date());
  data->epoch = epoch;

  // statics: across basins, so they stay informative (they are constant within a basin)
  Eigen::MatrixXd statics(static_cast<Eigen::Index>(series.size()), kStaticFeatures);
  for (std::size_t b = 0; b < series.size(); ++b)
    for (std::size_t k = 0; k < kStaticFeatures; ++k)
      statics(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) = series[b].statics[k];
  if (series.size() >= 2) {
    data->static_scaler = Scaler::fit(statics);
  } else {
    data->static_scaler = Scaler(statics.row(0).transpose(), Eigen::VectorXd::Zero(kStaticFeatures));
  }

  // trend scaling from the pooled training time indices
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < series.size(); ++b) {
    const auto& v = views[b].train;
    for (std::size_t i = 0; i < v.size; ++i) {
      const double idx = static_cast<double>(trend_index(series[b].axis.date_at(v.begin + i), epoch, data->resolution));
      sum += idx;
      sq += idx * idx;
      ++n;
    }
  }
  data->trend_mean = sum / static_cast<double>(n);
  data->trend_std = std::max(std::sqrt(std::max(sq / static_cast<double>(n) - data->trend_mean * data->trend_mean, 0.0)),
                             Scaler::kStdFloor);

  for (std::size_t b = 0; b < series.size(); ++b) {
    const auto& s = series[b];
    const auto& v = views[b];
    PreparedBasin p;
    p.basin_id = s.basin_id;
    p.axis = s.axis;
    p.scaler = fit_scaler(v.train);
    p.dynamic = p.scaler.transform([&] {
                  Eigen::MatrixXd all(s.dynamic.rows(), kDynamicChannels + 1);
                  all.leftCols(kDynamicChannels) = s.dynamic;
                  all.col(kDynamicChannels) = s.target;
                  return all;
                }())
                    .leftCols(kDynamicChannels);
    p.target_raw = s.target;
    const std::size_t T = s.length();
    p.month.resize(T);
    p.time_index.resize(T);
    p.trend.resize(T);
    p.split.assign(T, std::nullopt);
    for (std::size_t t = 0; t < T; ++t) {
      const Date d = s.axis.date_at(t);
      p.month[t] = static_cast<unsigned>(d.month());
      p.time_index[t] = trend_index(d, epoch, data->resolution);
      p.trend[t] = (static_cast<double>(p.time_index[t]) - data->trend_mean) / data->trend_std;
    }
    auto mark = [&](const SeriesView& view, Split label) {
      for (std::size_t i = 0; i < view.size; ++i) p.split[view.begin + i] = label;
    };
    mark(v.train, Split::Train);
    if (v.validation) mark(*v.validation, Split::Validation);
    mark(v.test, Split::Test);

    Eigen::MatrixXd row(1, kStaticFeatures);
    for (std::size_t k = 0; k < kStaticFeatures; ++k) row(0, static_cast<Eigen::Index>(k)) = s.statics[k];
    p.statics = data->static_scaler.transform(row).row(0).transpose();

    if (options.climatology == ClimatologyMode::TargetMonth) {
      // per-calendar-month training-period means of precip, temp, LAI
      p.monthly_climatology = Eigen::MatrixXd::Zero(12, 3);
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(12);
      for (std::size_t i = 0; i < v.train.size; ++i) {
        const std::size_t t = v.train.begin + i;
        const auto mo = static_cast<Eigen::Index>(p.month[t] - 1);
        for (Eigen::Index c = 0; c < 3; ++c) p.monthly_climatology(mo, c) += s.dynamic(static_cast<Eigen::Index>(t), c);
        counts[mo] += 1.0;
      }
      for (Eigen::Index mo = 0; mo < 12; ++mo)
        for (Eigen::Index c = 0; c < 3; ++c) {
          const double raw = counts[mo] > 0 ? p.monthly_climatology(mo, c) / counts[mo]
                                            : s.statics[kClimatologyOffset + static_cast<std::size_t>(c)];
          p.monthly_climatology(mo, c) = data->static_scaler.transform(raw, kClimatologyOffset + static_cast<std::size_t>(c));
        }
    }
    data->basins.push_back(std::move(p));
  }
  return data;
}

// ---- assembly ----------------------------------------------------------------

namespace {

int split_rank(Split s) { return static_cast<int>(s); }

}  // namespace

SupervisedSet assemble_supervised(std::shared_ptr<const PreparedData> data, const TaskSpec& task) {
  if (!data) fail(ErrorKind::EmptyInput, "no prepared data");
  task.validate(data->resolution);
  const auto L = static_cast<std::size_t>(task.sequence_length);
  const auto H = static_cast<std::size_t>(task.n_targets());
  const bool prior_ok = data->options.allow_prior_split_history;

  std::vector<ExampleRef> examples;
  std::vector<Eigen::VectorXd> target_model(data->basins.size());
  std::vector<Eigen::VectorXd> target_phys(data->basins.size());

  for (std::size_t b = 0; b < data->basins.size(); ++b) {
    const auto& p = data->basins[b];
    const std::size_t T = p.axis.length();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    target_phys[b] = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(T), nan);
    if (task.kind == TaskKind::DailySmoothed) {
      if (static_cast<std::size_t>(task.smoothing_window) > T)
        fail(ErrorKind::WindowTooLarge, "smoothing window exceeds series of basin " + p.basin_id);
      const auto sm = smooth_target(std::span<const double>(p.target_raw.data(), T), task.smoothing_window);
      for (std::size_t i = 0; i < sm.values.size(); ++i) target_phys[b][static_cast<Eigen::Index>(sm.first + i)] = sm.values[i];
    } else {
      target_phys[b] = p.target_raw;
    }
    target_model[b].resize(static_cast<Eigen::Index>(T));
    for (std::size_t t = 0; t < T; ++t) {
      const double v = target_phys[b][static_cast<Eigen::Index>(t)];
      target_model[b][static_cast<Eigen::Index>(t)] = std::isfinite(v) ? p.scaler.transform(v, kDynamicChannels) : nan;
    }

    std::map<Split, std::size_t> admissible_seen;
    std::map<Split, std::size_t> kept;
    for (std::size_t t = L; t + H <= T; ++t) {
      const auto s = p.split[t];
      if (!s) continue;
      bool ok = true;
      for (std::size_t h = 0; h < H && ok; ++h)
        ok = p.split[t + h] == s && std::isfinite(target_model[b][static_cast<Eigen::Index>(t + h)]);
      if (!ok) continue;  // targets straddling a boundary are dropped, never truncated
      for (std::size_t i = t - L; i < t && ok; ++i) {
        const auto si = p.split[i];
        if (prior_ok) {
          ok = !si || split_rank(*si) <= split_rank(*s);
        } else {
          ok = si == s;
        }
      }
      if (!ok) continue;
      if (task.kind == TaskKind::DailySmoothed) {
        const std::size_t j = admissible_seen[*s]++;
        if (j % static_cast<std::size_t>(task.daily_stride) != 0) continue;
      }
      examples.push_back(ExampleRef{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(t), *s});
      ++kept[*s];
    }
    std::vector<Split> required{Split::Train, Split::Test};
    if (data->options.split.validation) required.push_back(Split::Validation);
    for (Split s : required)
      if (kept[s] == 0)
        fail(ErrorKind::InsufficientHistory, "basin " + p.basin_id + " has no " + std::string(to_string(s)) +
                                                 " examples at sequence length " + std::to_string(L));
  }
  SupervisedSet set(std::move(data), task, std::move(examples), std::move(target_model), std::move(target_phys));
  check_leakage(set);
  return set;
}

SupervisedSet::SupervisedSet(std::shared_ptr<const PreparedData> data, TaskSpec task,
                             std::vector<ExampleRef> examples, std::vector<Eigen::VectorXd> target_model,
                             std::vector<Eigen::VectorXd> target_physical)
    : data_(std::move(data)),
      task_(task),
      examples_(std::move(examples)),
      target_model_(std::move(target_model)),
      target_physical_(std::move(target_physical)),
      flat_names_(twsbench::flat_feature_names(task.sequence_length)),
      sequence_names_(twsbench::sequence_channel_names()) {}

std::vector<ExampleRef> SupervisedSet::examples(Split s, std::optional<std::size_t> basin) const {
  std::vector<ExampleRef> out;
  for (const auto& e : examples_)
    if (e.split == s && (!basin || e.basin == *basin)) out.push_back(e);
  return out;
}

std::size_t SupervisedSet::count(Split s) const {
  std::size_t n = 0;
  for (const auto& e : examples_) n += e.split == s;
  return n;
}

Eigen::VectorXd SupervisedSet::flat_features(const ExampleRef& ref, int lead) const {
  const auto& p = data_->basins[ref.basin];
  const auto lags = lag_window(p.dynamic, ref.t, task_.sequence_length);
  const std::size_t tt = ref.t + static_cast<std::size_t>(lead - 1);
  if (lead < 1 || tt >= p.axis.length()) fail(ErrorKind::OutOfRange, "lead outside series");
  Eigen::VectorXd x(static_cast<Eigen::Index>(flat_width()));
  Eigen::Index i = 0;
  for (double v : lags) x[i++] = v;
  for (double v : month_dummies(p.month[tt])) x[i++] = v;
  x[i++] = p.trend[tt];
  return x;
}

Eigen::MatrixXd SupervisedSet::sequence_features(const ExampleRef& ref) const {
  const auto& p = data_->basins[ref.basin];
  const auto L = static_cast<std::size_t>(task_.sequence_length);
  Eigen::MatrixXd seq(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(kSequenceChannels));
  for (std::size_t k = 0; k < L; ++k) {
    const std::size_t s = ref.t - L + k;
    const auto r = static_cast<Eigen::Index>(k);
    seq.row(r).head(kDynamicChannels) = p.dynamic.row(static_cast<Eigen::Index>(s));
    const auto d = month_dummies(p.month[s]);
    for (std::size_t m = 0; m < kMonthDummies; ++m) seq(r, static_cast<Eigen::Index>(kDynamicChannels + m)) = d[m];
    seq(r, static_cast<Eigen::Index>(kSequenceChannels - 1)) = p.trend[s];
  }
  return seq;
}

Eigen::VectorXd SupervisedSet::static_features(const ExampleRef& ref) const {
  const auto& p = data_->basins[ref.basin];
  Eigen::VectorXd s = p.statics;
  if (data_->options.climatology == ClimatologyMode::TargetMonth) {
    const auto mo = static_cast<Eigen::Index>(p.month[ref.t] - 1);
    for (Eigen::Index c = 0; c < 3; ++c) s[static_cast<Eigen::Index>(kClimatologyOffset) + c] = p.monthly_climatology(mo, c);
  }
  return s;
}

Eigen::VectorXd SupervisedSet::targets(const ExampleRef& ref) const {
  return target_model_[ref.basin].segment(ref.t, task_.n_targets());
}

double SupervisedSet::target_physical(const ExampleRef& ref, int lead) const {
  return target_physical_[ref.basin][static_cast<Eigen::Index>(ref.t) + lead - 1];
}

double SupervisedSet::to_physical(const ExampleRef& ref, double standardized) const {
  return data_->basins[ref.basin].scaler.inverse(standardized, kDynamicChannels);
}

Date SupervisedSet::target_date(const ExampleRef& ref, int lead) const {
  return data_->basins[ref.basin].axis.date_at(ref.t + static_cast<std::size_t>(lead - 1));
}

SupervisedExample SupervisedSet::materialize(const ExampleRef& ref) const {
  SupervisedExample e;
  e.basin_id = basin_id(ref.basin);
  e.target_time = ref.t;
  e.flat_features = flat_features(ref);
  e.sequence_features = sequence_features(ref);
  e.static_features = static_features(ref);
  e.time_index = data_->basins[ref.basin].time_index[ref.t];
  e.targets = targets(ref);
  e.split = ref.split;
  return e;
}

DesignMatrix SupervisedSet::design_matrix(Split s, std::optional<std::size_t> basin, int lead) const {
  DesignMatrix dm;
  dm.refs = examples(s, basin);
  dm.X.resize(static_cast<Eigen::Index>(dm.refs.size()), static_cast<Eigen::Index>(flat_width()));
  dm.y.resize(static_cast<Eigen::Index>(dm.refs.size()));
  for (std::size_t i = 0; i < dm.refs.size(); ++i) {
    dm.X.row(static_cast<Eigen::Index>(i)) = flat_features(dm.refs[i], lead).transpose();
    dm.y[static_cast<Eigen::Index>(i)] = targets(dm.refs[i])[lead - 1];
  }
  return dm;
}

std::string SupervisedSet::manifest_json() const {
  nlohmann::ordered_json j;
  j["task"] = {{"kind", std::string(to_string(task_.kind))},
               {"sequence_length", task_.sequence_length},
               {"horizon", task_.n_targets()},
               {"smoothing_window", task_.kind == TaskKind::DailySmoothed ? task_.smoothing_window : 0},
               {"daily_stride", task_.kind == TaskKind::DailySmoothed ? task_.daily_stride : 0}};
  j["flat_features"] = flat_names_;
  j["sequence_channels"] = sequence_names_;
  j["static_features"] = std::vector<std::string>(kStaticNames.begin(), kStaticNames.end());
  j["target"] = std::string(kTargetName);
  j["counts"] = {{"train", count(Split::Train)},
                 {"validation", count(Split::Validation)},
                 {"test", count(Split::Test)}};
  j["epoch"] = format_date(data_->epoch);
  nlohmann::ordered_json prov = nlohmann::ordered_json::object();
  for (const auto& [k, v] : provenance) prov[k] = v;
  j["provenance"] = prov;
  return j.dump(2);
}

void check_leakage(const SupervisedSet& set) {
  const auto& data = set.data();
  const auto L = static_cast<std::size_t>(set.task().sequence_length);
  const auto H = static_cast<std::size_t>(set.task().n_targets());
  const bool prior_ok = data.options.allow_prior_split_history;
  for (const auto& e : set.examples()) {
    const auto& p = data.basins[e.basin];
    auto leak = [&](const std::string& why) {
      fail(ErrorKind::SplitLeakage, "basin " + p.basin_id + " target " + format_date(p.axis.date_at(e.t)) + ": " + why);
    };
    if (e.t < L || e.t + H > p.axis.length()) leak("window outside series");
    for (std::size_t h = 0; h < H; ++h)
      if (p.split[e.t + h] != e.split) leak("target outside its split");
    for (std::size_t i = e.t - L; i < e.t; ++i) {
      const auto si = p.split[i];
      if (si && split_rank(*si) > split_rank(e.split)) leak("input from a later split");
      if (!prior_ok && si != e.split) leak("input outside its split");
    }
  }
}

}  // namespace twsbench
