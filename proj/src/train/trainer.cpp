// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "aquacast/autodiff/ops.hpp"
#include "aquacast/errors.hpp"

namespace aquacast::train {

using data::Part;

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train config: batch_size must be at least 1");
  if (max_epochs < 1) throw ConfigError("train config: max_epochs must be at least 1");
  if (patience < 1) throw ConfigError("train config: patience must be at least 1");
  if (!(adam.lr > 0.0) && adam.lr != 0.0) throw ConfigError("train config: lr must be >= 0");
  if (adam.beta1 < 0.0 || adam.beta1 >= 1.0 || adam.beta2 < 0.0 || adam.beta2 >= 1.0) {
    throw ConfigError("train config: betas must lie in [0, 1)");
  }
  if (!(adam.eps > 0.0)) throw ConfigError("train config: eps must be positive");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"lr", c.adam.lr},
                     {"beta1", c.adam.beta1},
                     {"beta2", c.adam.beta2},
                     {"eps", c.adam.eps},
                     {"batch_size", c.batch_size},
                     {"max_epochs", c.max_epochs},
                     {"patience", c.patience},
                     {"seed", c.seed},
                     {"max_batches_per_epoch", c.max_batches_per_epoch}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  static const std::set<std::string> known{"lr",        "beta1",    "beta2", "eps",
                                           "batch_size", "max_epochs", "patience", "seed",
                                           "max_batches_per_epoch"};
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("train config: unknown key '" + key + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("lr", c.adam.lr);
  get("beta1", c.adam.beta1);
  get("beta2", c.adam.beta2);
  get("eps", c.adam.eps);
  get("batch_size", c.batch_size);
  get("max_epochs", c.max_epochs);
  get("patience", c.patience);
  get("seed", c.seed);
  get("max_batches_per_epoch", c.max_batches_per_epoch);
}

bool EarlyStopping::observe(double loss) {
  ++epochs_;
  if (best_epoch_ == 0 || loss < best_) {
    best_ = loss;
    best_epoch_ = epochs_;
    return true;
  }
  return false;
}

model::ModelConfig fit_config_to_data(model::ModelConfig base, const data::SeriesSet& set,
                                      const data::WindowShape& w) {
  base.n_hist_vars = set.history.size();
  base.n_forecast_vars = set.forecast.size();
  base.n_targets = set.targets.size();
  base.hist_len = w.hist_len;
  base.forecast_len = set.forecast.empty() ? 0 : w.horizon;
  base.horizon = w.horizon;
  base.validate();
  return base;
}

namespace {

void check_compatible(const model::ModelConfig& cfg, const data::SeriesSet& set,
                      const data::WindowShape& w) {
  if (cfg.n_hist_vars != set.history.size() || cfg.n_forecast_vars != set.forecast.size() ||
      cfg.n_targets != set.targets.size() || cfg.hist_len != w.hist_len ||
      cfg.horizon != w.horizon) {
    throw ConfigError("model expects V=" + std::to_string(cfg.n_hist_vars) + " F=" +
                      std::to_string(cfg.n_forecast_vars) + " targets=" +
                      std::to_string(cfg.n_targets) + " horizon=" + std::to_string(cfg.horizon) +
                      " but the data provides V=" + std::to_string(set.history.size()) + " F=" +
                      std::to_string(set.forecast.size()) + " targets=" +
                      std::to_string(set.targets.size()) + " horizon=" + std::to_string(w.horizon));
  }
}

}  // namespace

double train_step(const model::ModelConfig& cfg, model::ModelParams& params, AdamState& state,
                  const data::Batch& batch, const AdamConfig& adam, std::mt19937_64* dropout_rng) {
  ad::Graph g;
  const model::BoundParams bound = model::bind(g, params, true);
  model::ForwardOptions opts;
  opts.training = true;
  opts.rng = dropout_rng;
  const ad::Tensor forecast =
      cfg.n_forecast_vars > 0 ? g.constant(batch.forecast) : ad::Tensor{};
  const ad::Tensor pred = model::forward(cfg, bound, g.constant(batch.history), forecast, opts);
  const ad::Tensor loss = ad::mse_loss(pred, g.constant(batch.target));
  g.backward(loss);
  NamedGrads grads;
  for (const auto& [name, t] : bound.tensors) grads.emplace(name, t.grad());
  const double value = loss.item();
  adam_step(params.tensors, grads, state, adam);
  return value;
}

Predictions predict_windows(const model::ModelConfig& cfg, const model::ModelParams& params,
                            const data::SeriesSet& set, std::span<const std::size_t> starts,
                            const data::WindowShape& w, std::size_t batch_size) {
  check_compatible(cfg, set, w);
  const std::size_t nt = cfg.n_targets, h = w.horizon;
  Predictions out;
  out.starts.assign(starts.begin(), starts.end());
  out.pred = ad::Array({starts.size(), nt, h}, 0.0);
  out.truth = ad::Array({starts.size(), nt, h}, 0.0);
  for (std::size_t b = 0; b < starts.size(); b += batch_size) {
    const auto chunk = starts.subspan(b, std::min(batch_size, starts.size() - b));
    const data::Batch batch = data::make_batch(set, chunk, w);
    const ad::Array pred = model::predict(cfg, params, batch.history, batch.forecast);
    std::copy(pred.values.begin(), pred.values.end(), out.pred.values.begin() + b * nt * h);
    std::copy(batch.target.values.begin(), batch.target.values.end(),
              out.truth.values.begin() + b * nt * h);
  }
  return out;
}

double split_mse(const model::ModelConfig& cfg, const model::ModelParams& params,
                 const data::SeriesSet& set, Part part, const data::WindowShape& w) {
  const auto starts = data::window_starts(set, part, w);
  if (starts.empty()) throw ConfigError("the " + data::part_name(part) + " split holds no complete window");
  const Predictions p = predict_windows(cfg, params, set, starts, w);
  double se = 0.0;
  for (std::size_t i = 0; i < p.pred.size(); ++i) {
    const double e = p.pred.values[i] - p.truth.values[i];
    se += e * e;
  }
  return se / static_cast<double>(p.pred.size());
}

FitResult fit(const model::ModelConfig& cfg, model::ModelParams init, const data::SeriesSet& set,
              const data::WindowShape& w, const TrainConfig& tc, const EpochCallback& on_epoch) {
  tc.validate();
  check_compatible(cfg, set, w);
  const auto started = std::chrono::steady_clock::now();
  std::vector<std::size_t> train_starts = data::window_starts(set, Part::Train, w);
  if (train_starts.empty()) throw ConfigError("the train split holds no complete window");
  if (data::window_starts(set, Part::Val, w).empty()) {
    throw ConfigError("the val split holds no complete window");
  }

  std::mt19937_64 shuffle_rng(tc.seed);
  std::mt19937_64 dropout_rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);
  model::ModelParams params = std::move(init);
  AdamState state;
  EarlyStopping stopper(tc.patience);
  FitResult result;
  result.best = params;

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    std::shuffle(train_starts.begin(), train_starts.end(), shuffle_rng);
    std::size_t batches = (train_starts.size() + tc.batch_size - 1) / tc.batch_size;
    if (tc.max_batches_per_epoch > 0) batches = std::min(batches, tc.max_batches_per_epoch);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * tc.batch_size;
      const std::size_t n = std::min(tc.batch_size, train_starts.size() - lo);
      const data::Batch batch =
          data::make_batch(set, std::span<const std::size_t>(train_starts).subspan(lo, n), w);
      loss_sum += train_step(cfg, params, state, batch, tc.adam, &dropout_rng);
    }
    result.steps = state.step;
    const EpochRecord rec{epoch, loss_sum / static_cast<double>(batches),
                          split_mse(cfg, params, set, Part::Val, w)};
    if (!std::isfinite(rec.val_loss)) {
      throw NumericalError("validation loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.history.push_back(rec);
    if (stopper.observe(rec.val_loss)) result.best = params;
    if (on_epoch) on_epoch(rec);
    if (stopper.should_stop()) break;
  }
  result.best_epoch = stopper.best_epoch();
  result.best_val_loss = stopper.best_loss();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::string units_name(Units u) { return u == Units::Original ? "original" : "standardized"; }

Units parse_units(std::string_view s) {
  if (s == "standardized") return Units::Standardized;
  if (s == "original") return Units::Original;
  throw ConfigError("units must be 'standardized' or 'original', not '" + std::string(s) + "'");
}

Evaluation evaluate(const model::ModelConfig& cfg, const model::ModelParams& params,
                    const data::SeriesSet& set, Part part, const data::WindowShape& w,
                    Units units) {
  const auto starts = data::window_starts(set, part, w);
  if (starts.empty()) throw ConfigError("the " + data::part_name(part) + " split holds no complete window");
  Evaluation e;
  e.units = units;
  e.part = part;
  e.predictions = predict_windows(cfg, params, set, starts, w);
  const std::size_t n = starts.size(), nt = set.targets.size(), h = w.horizon;
  if (units == Units::Original) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t c = set.targets[t];
        for (std::size_t k = 0; k < h; ++k) {
          const std::size_t at = (i * nt + t) * h + k;
          e.predictions.pred.values[at] = set.stats.destandardize(c, e.predictions.pred.values[at]);
          e.predictions.truth.values[at] = set.stats.destandardize(c, e.predictions.truth.values[at]);
        }
      }
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    std::vector<double> truth, pred, dtw_errors;
    truth.reserve(n * h);
    pred.reserve(n * h);
    for (std::size_t i = 0; i < n; ++i) {
      const auto* tp = e.predictions.truth.values.data() + (i * nt + t) * h;
      const auto* pp = e.predictions.pred.values.data() + (i * nt + t) * h;
      truth.insert(truth.end(), tp, tp + h);
      pred.insert(pred.end(), pp, pp + h);
      if ((starts[i] - starts[0]) % h == 0) {
        dtw_errors.push_back(metrics::dtw_error(std::span<const double>(pp, h),
                                                std::span<const double>(tp, h)));
      }
    }
    e.targets.push_back({set.history_names[set.targets[t]], metrics::point_metrics(truth, pred),
                         metrics::accuracy_curve(std::move(dtw_errors))});
  }
  return e;
}

nlohmann::json evaluation_json(const Evaluation& e) {
  nlohmann::json j;
  j["units"] = units_name(e.units);
  j["split"] = data::part_name(e.part);
  j["windows"] = e.predictions.starts.size();
  auto& targets = j["targets"] = nlohmann::json::array();
  for (const auto& t : e.targets) {
    nlohmann::json r{{"name", t.name},
                     {"mse", t.point.mse},
                     {"mae", t.point.mae},
                     {"rmse", t.point.rmse},
                     {"auc", t.accuracy.auc},
                     {"dtw_samples", t.accuracy.errors.size()}};
    if (t.point.r2) {
      r["r2"] = *t.point.r2;
    } else {
      r["r2"] = nullptr;
      r["r2_note"] = t.point.r2_note;
    }
    targets.push_back(std::move(r));
  }
  return j;
}

nlohmann::json run_manifest(const model::ModelConfig& cfg, const TrainConfig& tc,
                            const data::SeriesSet& set, const data::WindowShape& w,
                            const FitResult& fit) {
  nlohmann::json j;
  j["model"] = cfg;
  j["train"] = tc;
  j["seed"] = tc.seed;
  j["rain"] = data::rain_name(set.config);
  j["history_channels"] = set.history_names;
  std::vector<std::string> targets;
  for (std::size_t t : set.targets) targets.push_back(set.history_names[t]);
  j["targets"] = targets;
  j["hist_len"] = w.hist_len;
  j["horizon"] = w.horizon;
  j["split"] = {{"train_end", set.split.train_end},
                {"val_end", set.split.val_end},
                {"total", set.split.total}};
  j["standardizer"] = set.stats;
  auto& log = j["epochs"] = nlohmann::json::array();
  for (const auto& r : fit.history) {
    log.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_loss", r.val_loss}});
  }
  j["best_epoch"] = fit.best_epoch;
  j["best_val_loss"] = fit.best_val_loss;
  j["steps"] = fit.steps;
  j["wall_seconds"] = fit.wall_seconds;
  return j;
}

}  // namespace aquacast::train
