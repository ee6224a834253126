#include "twsbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "twsbench/attribution.hpp"
#include "twsbench/errors.hpp"
#include "twsbench/metrics.hpp"
#include "twsbench/neural/checkpoint.hpp"
#include "twsbench/random.hpp"
#include "twsbench/stats.hpp"
#include "twsbench/synthetic.hpp"

namespace twsbench {

using json = nlohmann::ordered_json;

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t k = std::max<std::size_t>(1, std::min(workers, n));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

MetricTable ModelRun::metrics(int lead) const {
  MetricTable t;
  const auto& by_model = predictions.at(static_cast<std::size_t>(lead - 1));
  for (std::size_t m = 0; m < models.size(); ++m)
    for (const auto& bp : by_model[m]) t[bp.basin_id][models[m]] = compute_metrics(bp.truth, bp.pred);
  return t;
}

std::string trend_class(const BasinSeries& series) {
  const auto tr = trend_estimate(std::span<const double>(series.target.data(), series.length()));
  if (!tr.significant) return "none";
  return tr.slope < 0.0 ? "negative" : "positive";
}

namespace {

bool is_flat_model(std::string_view m) { return !is_neural_model(m); }
bool is_per_basin(std::string_view m) { return m == kLinearSingle || m == kRandomForest || m == kBoosted; }

void check_horizon(const std::vector<BasinSeries>& series, const SplitSpec& split, int horizon) {
  for (const auto& s : series) {
    const auto v = split_series(s, split);
    if (static_cast<std::size_t>(horizon) > v.test.size)
      fail(ErrorKind::HorizonExceedsSplit, "horizon " + std::to_string(horizon) + " exceeds the " +
                                               std::to_string(v.test.size) + "-step test split of basin " +
                                               s.basin_id);
    if (v.validation && static_cast<std::size_t>(horizon) > v.validation->size)
      fail(ErrorKind::HorizonExceedsSplit, "horizon " + std::to_string(horizon) + " exceeds the " +
                                               std::to_string(v.validation->size) +
                                               "-step validation split of basin " + s.basin_id);
  }
}

std::string params_label(const std::vector<std::string>& names, const std::vector<ParamValue>& values) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += ";";
    s += names[i] + "=" + (values[i] ? format_double(*values[i]) : std::string("None"));
  }
  return s;
}

BasinPrediction collect(const SupervisedSet& set, const std::vector<ExampleRef>& refs, const Eigen::VectorXd& yhat,
                        int lead) {
  BasinPrediction bp;
  if (!refs.empty()) bp.basin_id = set.basin_id(refs.front().basin);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    bp.dates.push_back(set.target_date(refs[i], lead));
    bp.truth.push_back(set.target_physical(refs[i], lead));
    bp.pred.push_back(set.to_physical(refs[i], yhat[static_cast<Eigen::Index>(i)]));
  }
  return bp;
}

}  // namespace

ModelRun run_models(const ExperimentConfig& config, const std::vector<BasinSeries>& series, const TaskSpec& task,
                    const std::vector<std::string>& models) {
  if (series.empty()) fail(ErrorKind::EmptyInput, "no basins to model");
  ModelRun run;
  run.models = models;
  for (const auto& s : series) run.basins.push_back(s.basin_id);
  const int H = task.n_targets();
  const std::size_t nb = series.size();
  const bool any_flat = std::any_of(models.begin(), models.end(), [](const auto& m) { return is_flat_model(m); });
  const bool any_neural = std::any_of(models.begin(), models.end(), [](const auto& m) { return is_neural_model(m); });

  std::vector<std::shared_ptr<const SupervisedSet>> flat_sets;
  if (any_flat) {
    PrepareOptions po;
    po.split = SplitSpec::linear_default();
    if (task.kind == TaskKind::Forecast) check_horizon(series, po.split, H);
    const auto data = prepare_basins(series, po);
    for (int h = 1; h <= H; ++h) {
      // direct strategy: the lead-h model is trained on windows whose last target is h steps ahead
      const TaskSpec th = task.kind == TaskKind::Forecast ? TaskSpec::forecast(task.sequence_length, h) : task;
      auto set = std::make_shared<const SupervisedSet>(assemble_supervised(data, th));
      run.feature_manifests.push_back(set->manifest_json());
      flat_sets.push_back(std::move(set));
    }
    run.flat_set = flat_sets.front();
  }
  if (any_neural) {
    PrepareOptions po;
    po.split = SplitSpec::neural_default();
    if (task.kind == TaskKind::Forecast) check_horizon(series, po.split, H);
    run.neural_set = std::make_shared<const SupervisedSet>(assemble_supervised(prepare_basins(series, po), task));
    run.feature_manifests.push_back(run.neural_set->manifest_json());
  }

  run.predictions.assign(static_cast<std::size_t>(H),
                         std::vector<std::vector<BasinPrediction>>(models.size(), std::vector<BasinPrediction>(nb)));
  std::vector<std::optional<LinearModel>> single_slots(nb);
  std::optional<LinearModel> glob_slot;
  std::vector<std::shared_ptr<const nn::NeuralModel>> neural_slots(models.size());
  std::vector<nn::TrainResult> history_slots(models.size());
  // grid records: [lead][model][basin]
  std::vector<std::vector<std::vector<std::optional<GridRecord>>>> grid_slots(
      static_cast<std::size_t>(H), std::vector<std::vector<std::optional<GridRecord>>>(models.size(),
                                                                                         std::vector<std::optional<GridRecord>>(nb)));

  std::vector<std::function<void()>> jobs;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const std::string& m = models[mi];
    if (is_neural_model(m)) {
      jobs.emplace_back([&, mi, m] {
        const auto s = config.neural_settings(m);
        nn::NeuralConfig nc;
        nc.kind = m == kLstm ? nn::ModelKind::Lstm : nn::ModelKind::TftLite;
        nc.hidden = s.hidden;
        nc.heads = s.heads;
        nc.outputs = static_cast<Eigen::Index>(H) * static_cast<Eigen::Index>(config.quantiles.size());
        nc.dropout = s.dropout;
        nc.use_time_index = m != kTftNoTime;
        nc.init = s.init;
        nn::TrainConfig tc;
        tc.learning_rate = s.learning_rate;
        tc.batch_size = s.batch_size;
        tc.max_epochs = s.max_epochs;
        tc.min_delta = s.min_delta;
        tc.patience = s.patience;
        tc.quantiles = config.quantiles;
        // both TFT variants share a seed so they differ only in the time embedding
        tc.seed = mix_seed(config.seed, nc.kind == nn::ModelKind::Lstm ? 101 : 202);
        const auto& set = *run.neural_set;
        const nn::SupervisedBatchSource train_src(set, set.examples(Split::Train));
        const nn::SupervisedBatchSource val_src(set, set.examples(Split::Validation));
        auto trained = nn::fit_neural(nc, tc, train_src, val_src);
        for (std::size_t b = 0; b < nb; ++b) {
          const nn::SupervisedBatchSource test_src(set, set.examples(Split::Test, b));
          const Eigen::MatrixXd out = nn::predict_all(*trained.model, test_src, tc.batch_size);
          for (int h = 1; h <= H; ++h) {
            const Eigen::VectorXd yhat = out.row(nn::point_row(config.quantiles, h)).transpose();
            run.predictions[static_cast<std::size_t>(h - 1)][mi][b] = collect(set, test_src.refs(), yhat, h);
          }
        }
        neural_slots[mi] = std::shared_ptr<const nn::NeuralModel>(std::move(trained.model));
        history_slots[mi] = std::move(trained.result);
      });
      continue;
    }
    for (int h = 1; h <= H; ++h) {
      const auto li = static_cast<std::size_t>(h - 1);
      const auto& set = *flat_sets[li];
      const int lead = set.task().n_targets();  // last target of the lead-h set
      if (m == kLinearGlob) {
        jobs.emplace_back([&, mi, li, lead] {
          const DesignMatrix train = set.design_matrix(Split::Train, std::nullopt, lead);
          LinearModel model = fit_ols(train.X, train.y);
          model.fitted_on = "global";
          model.feature_names = set.flat_feature_names();
          for (std::size_t b = 0; b < nb; ++b) {
            const DesignMatrix test = set.design_matrix(Split::Test, b, lead);
            run.predictions[li][mi][b] = collect(set, test.refs, model.predict(test.X), lead);
          }
          if (li == 0) glob_slot = std::move(model);
        });
        continue;
      }
      if (!is_per_basin(m)) fail(ErrorKind::InvalidConfig, "unsupported model '" + m + "'");
      for (std::size_t b = 0; b < nb; ++b) {
        jobs.emplace_back([&, mi, li, lead, b, m] {
          const DesignMatrix train = set.design_matrix(Split::Train, b, lead);
          const DesignMatrix test = set.design_matrix(Split::Test, b, lead);
          Eigen::VectorXd yhat;
          if (m == kLinearSingle) {
            LinearModel model;
            try {
              model = fit_ols(train.X, train.y);
            } catch (const Error& e) {
              fail(e.kind(), "basin " + set.basin_id(b) + ": " + e.what());
            }
            model.fitted_on = set.basin_id(b);
            model.feature_names = set.flat_feature_names();
            yhat = model.predict(test.X);
            if (li == 0) single_slots[b] = std::move(model);
          } else {
            const TreeFamily fam = m == kRandomForest ? TreeFamily::RandomForest : TreeFamily::Boosted;
            GridSearchSpec spec = fam == TreeFamily::RandomForest ? GridSearchSpec::random_forest_default()
                                                                   : GridSearchSpec::boosted_default();
            spec.holdout_fraction = config.tree_holdout_fraction;
            const auto res = grid_search(fam, spec, train.X, train.y, mix_seed(config.seed, 1000 + b));
            yhat = res.predict(test.X);
            const auto& best = res.evaluated[res.best_index];
            grid_slots[li][mi][b] = GridRecord{set.basin_id(b), H > 1 ? m + "@lead=" + std::to_string(li + 1) : m,
                                               res.evaluated.size(), params_label(res.names, best.values),
                                               best.holdout_mae};
          }
          run.predictions[li][mi][b] = collect(set, test.refs, yhat, lead);
        });
      }
    }
  }
  parallel_for(jobs.size(), config.workers, [&](std::size_t i) { jobs[i](); });

  for (std::size_t b = 0; b < nb; ++b)
    if (single_slots[b]) run.linear_single.emplace(run.basins[b], std::move(*single_slots[b]));
  run.linear_glob = std::move(glob_slot);
  for (std::size_t mi = 0; mi < models.size(); ++mi)
    if (neural_slots[mi]) {
      run.neural[models[mi]] = neural_slots[mi];
      run.histories[models[mi]] = history_slots[mi];
    }
  for (const auto& lead : grid_slots)
    for (const auto& model : lead)
      for (const auto& rec : model)
        if (rec) run.grid.push_back(*rec);
  return run;
}

// ---- data ------------------------------------------------------------------

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<BasinSeries> load_experiment_data(const ExperimentConfig& config, std::string* input_hash) {
  if (config.uses_files()) {
    if (input_hash) {
      std::uint64_t h = fnv1a64(read_file(config.dynamic_path));
      h = fnv1a64(read_file(config.static_path), h);
      *input_hash = "fnv1a64:" + hex64(h);
    }
    return load_basin_series(config.dynamic_path, config.static_path);
  }
  const auto syn = config.resolved_synthetic();
  if (input_hash) *input_hash = "fnv1a64:" + hex64(fnv1a64(synthetic_config_to_json(syn)));
  return generate_synthetic(syn);
}

// ---- report assembly -------------------------------------------------------

namespace {

struct SettingRun {
  std::string label;  // "" | "L=12" | "lead=3"
  ModelRun run;
  int lead = 1;
};

std::string experiment_label(const ExperimentConfig& c, const std::string& setting) {
  std::string s(to_string(c.kind));
  return setting.empty() ? s : s + "/" + setting;
}

std::string model_label(const std::string& model, const std::string& setting) {
  return setting.empty() ? model : model + "@" + setting;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<double> defined_values(const MetricTable& t, const std::string& model, const std::string& metric,
                                   const std::vector<std::string>* basins = nullptr) {
  std::vector<double> out;
  for (const auto& [basin, row] : t) {
    if (basins && std::find(basins->begin(), basins->end(), basin) == basins->end()) continue;
    if (auto v = row.at(model).get(metric)) out.push_back(*v);
  }
  return out;
}

std::optional<double> median_of(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  return quantile_linear(v, 0.5);
}

const std::vector<std::string>& significance_metrics() {
  static const std::vector<std::string> m{"abs_bias", "rmse", "corr", "nse", "kge"};
  return m;
}

void significance_rows(std::string& csv, const MetricTable& t, const std::string& a, const std::string& b,
                       const std::string& setting) {
  for (const auto& metric : significance_metrics()) {
    const auto va = defined_values(t, a, metric);
    const auto vb = defined_values(t, b, metric);
    if (va.empty() || vb.empty()) continue;
    for (auto alt : {Alternative::TwoSided, Alternative::Less, Alternative::Greater}) {
      const auto r = mann_whitney_u(va, vb, alt);
      csv += model_label(a, setting) + "," + model_label(b, setting) + "," + metric + "," +
             std::string(to_string(alt)) + "," + format_double(r.u) + "," + format_double(r.p) + "," +
             std::string(to_string(r.method)) + "\n";
    }
  }
}

std::string timeseries_csv(const ModelRun& run, std::size_t b, int lead) {
  const auto& preds = run.predictions[static_cast<std::size_t>(lead - 1)];
  std::string csv = "date,truth";
  for (const auto& m : run.models) csv += "," + m;
  csv += "\n";
  // models on different splits share the test period; align on dates of the first model
  const auto& ref = preds[0][b];
  for (std::size_t i = 0; i < ref.dates.size(); ++i) {
    csv += format_date(ref.dates[i]) + "," + format_double(ref.truth[i]);
    for (std::size_t m = 0; m < run.models.size(); ++m) {
      const auto& p = preds[m][b];
      const auto it = std::find(p.dates.begin(), p.dates.end(), ref.dates[i]);
      csv += ",";
      if (it != p.dates.end()) csv += format_double(p.pred[static_cast<std::size_t>(it - p.dates.begin())]);
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::string hash;
  const auto series = load_experiment_data(config, &hash);
  return run_experiment(config, series, hash);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<BasinSeries>& series,
                                const std::string& input_hash) {
  config.validate();
  if (series.empty()) fail(ErrorKind::EmptyInput, "dataset has no basins");
  const auto models = config.resolved_models();
  const int L = config.effective_sequence_length();
  const Resolution res = series.front().axis.resolution();
  if (config.kind == ExperimentKind::DailySmoothed && res != Resolution::Daily)
    fail(ErrorKind::ResolutionMismatch, "daily_smoothed requires daily data, got monthly");
  if (config.kind != ExperimentKind::DailySmoothed && res != Resolution::Monthly)
    fail(ErrorKind::ResolutionMismatch, std::string(to_string(config.kind)) + " requires monthly data");

  // ---- run every setting
  std::vector<SettingRun> runs;
  switch (config.kind) {
    case ExperimentKind::SeqLenSweep:
      for (int l : config.sequence_lengths)
        runs.push_back({"L=" + std::to_string(l), run_models(config, series, TaskSpec::regression(l), models), 1});
      break;
    case ExperimentKind::ForecastSweep: {
      auto run = run_models(config, series, TaskSpec::forecast(L, config.horizon), models);
      for (int h = 1; h <= config.horizon; ++h) runs.push_back({"lead=" + std::to_string(h), run, h});
      break;
    }
    case ExperimentKind::DailySmoothed:
      runs.push_back({"", run_models(config, series,
                                     TaskSpec::daily_smoothed(L, config.smoothing_window, config.daily_stride), models),
                      1});
      break;
    default:
      runs.push_back({"", run_models(config, series, TaskSpec::regression(L), models), 1});
  }

  ExperimentResult result;
  Report& rep = result.report;
  const std::string reference = std::find(models.begin(), models.end(), kLinearSingle) != models.end()
                                    ? std::string(kLinearSingle)
                                    : models.front();

  // trend strata over the full record
  std::map<std::string, std::string> trend_of;
  std::map<std::string, TrendEstimate> trend_est;
  for (const auto& s : series) {
    trend_est[s.basin_id] = trend_estimate(std::span<const double>(s.target.data(), s.length()));
    trend_of[s.basin_id] = trend_class(s);
  }

  std::string metrics_csv = "basin_id,model,experiment,metric,value,defined\n";
  std::map<std::string, std::string> cdf;
  for (const auto& m : metric_names()) cdf[m] = "model,value,cumulative\n";
  std::string sig_csv = "model_a,model_b,metric,alternative,U,p,method\n";
  std::string rank_csv = "experiment,basin_id,best,second,metric,trend_slope,trend_class\n";
  std::string coef_csv;
  std::string attr_csv;
  bool any_sig = false;

  for (const auto& sr : runs) {
    const MetricTable table = sr.run.metrics(sr.lead);
    const std::string exp = experiment_label(config, sr.label);
    for (const auto& basin : sr.run.basins)
      for (const auto& m : models) {
        const auto& ms = table.at(basin).at(m);
        for (const auto& metric : metric_names()) {
          const auto v = ms.get(metric);
          metrics_csv += basin + "," + m + "," + exp + "," + metric + "," + fmt_opt(v) + "," + (v ? "1" : "0") + "\n";
        }
      }
    for (const auto& metric : metric_names())
      for (const auto& m : models) {
        const auto vals = defined_values(table, m, metric);
        if (vals.empty()) continue;
        for (const auto& p : empirical_cdf(vals).cdf)
          cdf[metric] += model_label(m, sr.label) + "," + format_double(p.value) + "," + format_double(p.cumulative) + "\n";
      }
    if (models.size() > 1) {
      for (const auto& m : models)
        if (m != reference) {
          significance_rows(sig_csv, table, m, reference, sr.label);
          any_sig = true;
        }
      if (config.kind == ExperimentKind::TimeIndexAblation) significance_rows(sig_csv, table, std::string(kTft), std::string(kTftNoTime), sr.label);
      for (const auto& r : rank_models(table, "nse"))
        rank_csv += exp + "," + r.basin_id + "," + r.best() + "," + r.second() + ",nse," +
                    format_double(trend_est[r.basin_id].slope) + "," + trend_of[r.basin_id] + "\n";
    }
    for (const auto& m : models) {
      const auto nse = defined_values(table, m, "nse");
      const auto kge = defined_values(table, m, "kge");
      result.summaries.push_back({sr.label, m, median_of(nse), median_of(kge)});
    }

    // coefficient distributions (lead-1 linear models only)
    if (sr.lead == 1 && !sr.run.linear_single.empty() && sr.run.linear_glob) {
      if (coef_csv.empty())
        coef_csv = "experiment,feature,q1,median,q3,whisker_low,whisker_high,global_weight,global_inside_iqr\n";
      for (const auto& fc : coefficient_distribution(sr.run.linear_single, *sr.run.linear_glob))
        coef_csv += exp + "," + fc.feature + "," + format_double(fc.per_basin.q1) + "," +
                    format_double(fc.per_basin.median) + "," + format_double(fc.per_basin.q3) + "," +
                    format_double(fc.per_basin.whisker_low) + "," + format_double(fc.per_basin.whisker_high) + "," +
                    format_double(fc.global_weight) + "," + (fc.global_inside_iqr() ? "1" : "0") + "\n";
    }

    // training histories, once per neural run
    if (sr.lead == 1)
      for (const auto& [m, hist] : sr.run.histories)
        rep.add("history/" + model_label(m, sr.label) + ".csv", nn::history_csv(hist.history));

    if (config.kind == ExperimentKind::SeqLenSweep) {
      if (attr_csv.empty()) attr_csv = "model,seq_len,step,importance\n";
      for (const auto& m : models) {
        const auto it = sr.run.neural.find(m);
        if (it == sr.run.neural.end()) continue;
        auto emit = [&](const AttributionReport& a) {
          for (std::size_t s = 0; s < a.importance.size(); ++s)
            attr_csv += a.model + "," + std::to_string(a.sequence_length) + "," + std::to_string(s + 1) + "," +
                        format_double(a.importance[s]) + "\n";
        };
        emit(occlusion_importance(*it->second, *sr.run.neural_set, Split::Test, config.quantiles, m));
        if (m != kLstm) emit(mean_attention(*it->second, *sr.run.neural_set, Split::Test, m + "_attention"));
      }
    }
  }

  if (config.kind == ExperimentKind::TreeBaselines || !runs.front().run.grid.empty()) {
    std::string grid_csv = "basin_id,model,candidates,best_params,holdout_mae\n";
    for (const auto& g : runs.front().run.grid)
      grid_csv += g.basin_id + "," + g.model + "," + std::to_string(g.candidates) + "," + g.best_params + "," +
                  format_double(g.holdout_mae) + "\n";
    rep.add("grid_search.csv", grid_csv);
  }

  if (config.kind == ExperimentKind::TimeIndexAblation) {
    const auto& run = runs.front().run;
    const MetricTable table = run.metrics(1);
    std::vector<std::string> negative;
    for (const auto& b : run.basins)
      if (trend_of[b] == "negative") negative.push_back(b);
    std::string abl = "stratum,model,metric,mean,n_basins\n";
    const std::vector<std::pair<std::string, std::string>> rows{
        {"Bias", "bias"}, {"RMSE", "rmse"}, {"Corr", "corr"}, {"NSE", "nse"}, {"KGE", "kge"}};
    for (const auto& [stratum, members] :
         std::vector<std::pair<std::string, std::vector<std::string>>>{{"negative_trend", negative}, {"all", run.basins}})
      for (const auto& m : models)
        for (const auto& [label, key] : rows) {
          const auto vals = defined_values(table, m, key, &members);
          std::optional<double> mean;
          if (!vals.empty()) {
            double s = 0.0;
            for (double v : vals) s += v;
            mean = s / static_cast<double>(vals.size());
          }
          abl += stratum + "," + m + "," + label + "," + fmt_opt(mean) + "," + std::to_string(vals.size()) + "\n";
        }
    rep.add("ablation_table.csv", abl);
    for (std::size_t b = 0; b < run.basins.size(); ++b)
      rep.add("timeseries/" + run.basins[b] + ".csv", timeseries_csv(run, b, 1));
  }

  rep.add("metrics.csv", metrics_csv);
  for (const auto& [m, text] : cdf) rep.add("cdf_" + m + ".csv", text);
  if (any_sig) rep.add("significance.csv", sig_csv);
  if (models.size() > 1) rep.add("rankings.csv", rank_csv);
  if (!coef_csv.empty()) rep.add("coefficients.csv", coef_csv);
  if (!attr_csv.empty()) rep.add("attribution.csv", attr_csv);

  // ---- manifest
  json man;
  man["tool"] = "twsbench";
  man["version"] = "0.1.0";
  man["experiment"] = std::string(to_string(config.kind));
  man["seed"] = config.seed;
  man["input_hash"] = input_hash;
  man["config"] = json::parse(experiment_config_to_json(config, true));
  json data;
  data["source"] = config.uses_files() ? "files" : "synthetic";
  data["n_basins"] = series.size();
  data["resolution"] = std::string(to_string(res));
  man["data"] = data;
  json features = json::object();
  std::set<std::string> seen_run;
  for (const auto& sr : runs) {
    const std::string key = sr.label.rfind("lead=", 0) == 0 ? std::string("forecast") : (sr.label.empty() ? std::string("main") : sr.label);
    if (!seen_run.insert(key).second) continue;
    json arr = json::array();
    for (const auto& fm : sr.run.feature_manifests) arr.push_back(json::parse(fm));
    features[key] = arr;
  }
  man["feature_manifests"] = features;
  json versions;
  versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  versions["cxx_standard"] = static_cast<long>(__cplusplus);
#if defined(__VERSION__)
  versions["compiler"] = __VERSION__;
#endif
  man["versions"] = versions;
  std::vector<std::string> files;
  for (const auto& [path, _] : rep.files) files.push_back(path);
  files.push_back("manifest.json");
  std::sort(files.begin(), files.end());
  man["files"] = files;
  rep.add("manifest.json", man.dump(2) + "\n");
  return result;
}

}  // namespace twsbench
