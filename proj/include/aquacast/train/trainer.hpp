// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aquacast/data/windows.hpp"
#include "aquacast/metrics/dtw.hpp"
#include "aquacast/metrics/point.hpp"
#include "aquacast/model/aquacast.hpp"
#include "aquacast/train/adam.hpp"

namespace aquacast::train {

struct TrainConfig {
  AdamConfig adam;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  // Caps the number of minibatches per epoch (0 = every training window).
  // Each epoch then sees a fresh random subset of the shuffled windows.
  std::size_t max_batches_per_epoch = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Patience bookkeeping: an epoch improves only if its loss is strictly lower
/// than every earlier one.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}
  /// Records the next epoch's validation loss; returns true if it improved.
  bool observe(double loss);
  bool should_stop() const { return epochs_ - best_epoch_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }  // 1-based, 0 before any epoch
  double best_loss() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t best_epoch_ = 0;
  double best_ = 0.0;
};

/// Architecture fields (V, F, targets, lengths) filled in from the data.
model::ModelConfig fit_config_to_data(model::ModelConfig base, const data::SeriesSet& set,
                                      const data::WindowShape& w);

/// Forward + backward + Adam on one batch; returns the batch MSE before the update.
double train_step(const model::ModelConfig& cfg, model::ModelParams& params, AdamState& state,
                  const data::Batch& batch, const AdamConfig& adam, std::mt19937_64* dropout_rng);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct FitResult {
  model::ModelParams best;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  std::vector<EpochRecord> history;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Seeded shuffled minibatch training with validation-based early stopping.
/// Returns the parameters of the best validation epoch. Throws ConfigError
/// when the training or validation split holds no complete window.
FitResult fit(const model::ModelConfig& cfg, model::ModelParams init, const data::SeriesSet& set,
              const data::WindowShape& w, const TrainConfig& tc, const EpochCallback& on_epoch = {});

/// Predictions for `starts`, standardized, [N, n_targets, horizon].
struct Predictions {
  std::vector<std::size_t> starts;
  ad::Array pred;
  ad::Array truth;
};

Predictions predict_windows(const model::ModelConfig& cfg, const model::ModelParams& params,
                            const data::SeriesSet& set, std::span<const std::size_t> starts,
                            const data::WindowShape& w, std::size_t batch_size = 64);

/// Standardized-unit MSE over all windows of a split.
double split_mse(const model::ModelConfig& cfg, const model::ModelParams& params,
                 const data::SeriesSet& set, data::Part part, const data::WindowShape& w);

enum class Units { Standardized, Original };
std::string units_name(Units u);
Units parse_units(std::string_view s);

struct TargetEvaluation {
  std::string name;
  metrics::PointMetrics point;
  metrics::DtwAccuracyCurve accuracy;
};

struct Evaluation {
  Units units = Units::Standardized;
  data::Part part = data::Part::Test;
  std::vector<TargetEvaluation> targets;
  Predictions predictions;  // in `units`
};

/// Point metrics over every stride-1 window of the split; DTW accuracy over
/// the non-overlapping subset (stride = horizon). With Units::Original the
/// predictions are destandardized with the training statistics first.
Evaluation evaluate(const model::ModelConfig& cfg, const model::ModelParams& params,
                    const data::SeriesSet& set, data::Part part, const data::WindowShape& w,
                    Units units = Units::Standardized);

nlohmann::json evaluation_json(const Evaluation& e);

nlohmann::json run_manifest(const model::ModelConfig& cfg, const TrainConfig& tc,
                            const data::SeriesSet& set, const data::WindowShape& w,
                            const FitResult& fit);

}  // namespace aquacast::train
