// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails. Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "../support/gradcheck.hpp"
#include "../support/oracles.hpp"
#include "aquacast/autodiff/ops.hpp"
#include "aquacast/cdm/network.hpp"
#include "aquacast/cdm/synth.hpp"
#include "aquacast/cdm/terrain.hpp"
#include "aquacast/cli/app.hpp"
#include "aquacast/data/dataset.hpp"
#include "aquacast/data/preprocess.hpp"
#include "aquacast/data/windows.hpp"
#include "aquacast/metrics/complexity.hpp"
#include "aquacast/metrics/dtw.hpp"
#include "aquacast/model/aquacast.hpp"
#include "aquacast/model/params.hpp"
#include "aquacast/train/trainer.hpp"

using namespace aquacast;
namespace fs = std::filesystem;
using ad::Array;
using ad::Graph;
using ad::Tensor;
using check::random_array;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aquacast_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------
// 1. Gradient soundness

// Squared distance to a fixed pseudo-random target, so each output element
// gets its own weight in the loss.
Tensor against_target(Graph& g, const Tensor& y) {
  std::mt19937_64 rng(1234);
  return ad::mse_loss(y, g.constant(random_array(y.shape(), rng, -2.0, 2.0)));
}

struct OpCase {
  std::string name;
  check::LossBuilder loss;
  std::vector<Array> inputs;
};

std::vector<OpCase> op_cases() {
  std::mt19937_64 rng(11);
  auto r = [&](ad::Shape s, double scale = 1.0) { return random_array(std::move(s), rng, -scale, scale); };
  using L = std::vector<Tensor>;
  std::vector<OpCase> c;
  c.push_back({"matmul", [](Graph& g, const L& x) { return against_target(g, ad::matmul(x[0], x[1])); },
               {r({3, 4}), r({4, 5})}});
  c.push_back({"matmul (batched)",
               [](Graph& g, const L& x) { return against_target(g, ad::matmul(x[0], x[1])); },
               {r({2, 3, 4}), r({2, 4, 5})}});
  c.push_back({"matmul_nt", [](Graph& g, const L& x) { return against_target(g, ad::matmul_nt(x[0], x[1])); },
               {r({3, 4}), r({5, 4})}});
  c.push_back({"matmul_nt (batched)",
               [](Graph& g, const L& x) { return against_target(g, ad::matmul_nt(x[0], x[1])); },
               {r({2, 3, 4}), r({2, 5, 4})}});
  c.push_back({"linear", [](Graph& g, const L& x) { return against_target(g, ad::linear(x[0], x[1], x[2])); },
               {r({2, 3, 4}), r({4, 5}), r({5})}});
  c.push_back({"linear (no bias)",
               [](Graph& g, const L& x) { return against_target(g, ad::linear(x[0], x[1], Tensor{})); },
               {r({3, 4}), r({4, 2})}});
  c.push_back({"conv1d", [](Graph& g, const L& x) { return against_target(g, ad::conv1d(x[0], x[1], x[2], 2)); },
               {r({2, 3, 11}), r({4, 3, 3}), r({4})}});
  c.push_back({"conv1d (unbatched)",
               [](Graph& g, const L& x) { return against_target(g, ad::conv1d(x[0], x[1], x[2], 1)); },
               {r({2, 9}), r({3, 2, 4}), r({3})}});
  c.push_back({"softmax_rows", [](Graph& g, const L& x) { return against_target(g, ad::softmax_rows(x[0])); },
               {r({2, 3, 5}, 3.0)}});
  c.push_back({"layer_norm",
               [](Graph& g, const L& x) { return against_target(g, ad::layer_norm(x[0], x[1], x[2])); },
               {r({2, 4, 6}, 2.0), r({6}), r({6})}});
  Array kinked = r({4, 6});
  for (double& v : kinked.values) v += v < 0 ? -0.05 : 0.05;  // keep clear of the kink
  c.push_back({"relu", [](Graph& g, const L& x) { return against_target(g, ad::relu(x[0])); }, {kinked}});
  c.push_back({"add", [](Graph& g, const L& x) { return against_target(g, ad::add(x[0], x[1])); },
               {r({3, 4}), r({3, 4})}});
  c.push_back({"add_broadcast",
               [](Graph& g, const L& x) { return against_target(g, ad::add_broadcast(x[0], x[1])); },
               {r({2, 3, 4}), r({3, 4})}});
  c.push_back({"scale", [](Graph& g, const L& x) { return against_target(g, ad::scale(x[0], -0.7)); },
               {r({3, 4})}});
  c.push_back({"dropout",
               [](Graph& g, const L& x) {
                 std::mt19937_64 mask(5);  // same mask on every evaluation
                 return against_target(g, ad::dropout(x[0], 0.3, &mask));
               },
               {r({4, 8})}});
  c.push_back({"transpose_last2",
               [](Graph& g, const L& x) { return against_target(g, ad::transpose_last2(x[0])); },
               {r({2, 3, 4})}});
  c.push_back({"reshape", [](Graph& g, const L& x) { return against_target(g, ad::reshape(x[0], {6, 4})); },
               {r({2, 3, 4})}});
  c.push_back({"flatten", [](Graph& g, const L& x) { return against_target(g, ad::flatten(x[0])); },
               {r({2, 3, 4})}});
  c.push_back({"flatten_batch",
               [](Graph& g, const L& x) { return against_target(g, ad::flatten_batch(x[0])); },
               {r({2, 3, 4})}});
  c.push_back({"concat", [](Graph& g, const L& x) { return against_target(g, ad::concat(x[0], x[1], 1)); },
               {r({2, 3}), r({2, 4})}});
  c.push_back({"concat (axis 0)",
               [](Graph& g, const L& x) { return against_target(g, ad::concat(x[0], x[1], 0)); },
               {r({2, 3, 2}), r({1, 3, 2})}});
  c.push_back({"slice", [](Graph& g, const L& x) { return against_target(g, ad::slice(x[0], 1, 1, 4)); },
               {r({2, 6, 3})}});
  c.push_back({"split_heads",
               [](Graph& g, const L& x) { return against_target(g, ad::split_heads(x[0], 2)); },
               {r({2, 3, 8})}});
  c.push_back({"merge_heads",
               [](Graph& g, const L& x) { return against_target(g, ad::merge_heads(x[0], 2)); },
               {r({4, 3, 4})}});
  c.push_back({"sum", [](Graph& g, const L& x) { return against_target(g, ad::sum(x[0])); }, {r({3, 5})}});
  c.push_back({"mse_loss", [](Graph&, const L& x) { return ad::mse_loss(x[0], x[1]); },
               {r({3, 5}), r({3, 5})}});
  return c;
}

model::ModelConfig small_model() {
  model::ModelConfig c;
  c.n_hist_vars = 3;
  c.n_forecast_vars = 1;
  c.forecast_len = 6;
  c.n_targets = 2;
  c.hist_len = 16;
  c.kernel1 = 4;
  c.patch_stride = 4;
  c.horizon = 6;
  c.d_model = 8;
  c.n_heads = 2;
  c.d_ff = 12;
  c.n_layers = 2;
  c.dropout = 0.0;
  return c;
}

// Full finite-difference check over every parameter of a small model.
double small_model_error() {
  const model::ModelConfig c = small_model();
  const model::ModelParams params = model::init_params(c);
  std::mt19937_64 rng(21);
  const Array hist = random_array({2, 3, 16}, rng);
  const Array rain = random_array({2, 1, 6}, rng);
  const Array target = random_array({2, 2, 6}, rng);
  std::vector<std::string> order;
  std::vector<Array> inputs;
  for (const auto& [name, a] : params.tensors) {
    order.push_back(name);
    inputs.push_back(a);
  }
  const auto loss = [&](Graph& g, const std::vector<Tensor>& leaves) {
    model::BoundParams p;
    for (std::size_t i = 0; i < order.size(); ++i) p.tensors.emplace(order[i], leaves[i]);
    return ad::mse_loss(model::forward(c, p, g.constant(hist), g.constant(rain)), g.constant(target));
  };
  return check::gradcheck(loss, inputs);
}

// Directional derivatives of the default-scale model: the analytic g·v
// against a central difference along v, for a few random directions v.
double default_model_error() {
  model::ModelConfig c;
  c.n_hist_vars = 3;
  c.n_forecast_vars = 1;
  c.forecast_len = 96;
  c.n_targets = 2;
  c.dropout = 0.0;
  const model::ModelParams params = model::init_params(c);
  std::mt19937_64 rng(22);
  const Array hist = random_array({2, 3, 96}, rng);
  const Array rain = random_array({2, 1, 96}, rng);
  const Array target = random_array({2, 2, 96}, rng);
  auto loss_at = [&](const model::ModelParams& p) {
    Graph g;
    const model::BoundParams b = model::bind(g, p, false);
    return ad::mse_loss(model::forward(c, b, g.constant(hist), g.constant(rain)), g.constant(target)).item();
  };

  Graph g;
  const model::BoundParams bound = model::bind(g, params, true);
  Tensor loss = ad::mse_loss(model::forward(c, bound, g.constant(hist), g.constant(rain)), g.constant(target));
  g.backward(loss);

  const double h = 1e-4;
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int dir = 0; dir < 4; ++dir) {
    // Unit-norm direction, so the step stays h long however many weights there are.
    std::map<std::string, std::vector<double>> v;
    double norm = 0.0;
    for (const auto& [name, a] : params.tensors) {
      auto& d = v[name];
      for (std::size_t i = 0; i < a.size(); ++i) norm += std::pow(d.emplace_back(n(rng)), 2);
    }
    norm = std::sqrt(norm);
    model::ModelParams up = params, down = params;
    double analytic = 0.0;
    for (const auto& [name, a] : params.tensors) {
      const auto grad = bound.at(name).grad();
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double step = v[name][i] / norm;
        analytic += grad[i] * step;
        up.at(name).values[i] += h * step;
        down.at(name).values[i] -= h * step;
      }
    }
    const double numeric = (loss_at(up) - loss_at(down)) / (2.0 * h);
    worst = std::max(worst, std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric)));
  }
  return worst;
}

Outcome gradient_soundness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_op = 0.0;
  std::string worst_name;
  for (const OpCase& c : op_cases()) {
    const double e = check::gradcheck(c.loss, c.inputs, 1e-4);
    if (e >= worst_op) {
      worst_op = e;
      worst_name = c.name;
    }
  }
  const double small = small_model_error();
  const double full = default_model_error();
  const double model = std::max(small, full);
  const double elapsed = seconds_since(t0);
  return {worst_op <= 1e-4 && model <= 1e-3 && elapsed < 60.0,
          fmt("worst op %.2e (%s, bar 1e-4); model %.2e small / %.2e default-scale (bar 1e-3); "
              "suite %.1f s (bar 60 s)",
              worst_op, worst_name.c_str(), small, full, elapsed)};
}

// ---------------------------------------------------------------------------
// 2. Architecture laws

bool is_attention(const std::string& name) {
  for (const char* leaf : {".wq", ".wk", ".wv", ".wo"}) {
    const std::string s = leaf;
    if (name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) return true;
  }
  return false;
}

Outcome architecture_laws() {
  std::mt19937_64 rng(31);
  std::size_t violations = 0;
  double worst_row = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    model::ModelConfig c;
    c.n_heads = std::size_t{1} << (rng() % 3);
    c.d_model = c.n_heads * (2 + rng() % 4);
    c.d_ff = 4 + rng() % 16;
    c.n_layers = 1 + rng() % 3;
    c.n_hist_vars = 1 + rng() % 4;
    c.kernel1 = 2 + rng() % 6;
    c.patch_stride = 1 + rng() % c.kernel1;
    c.hist_len = c.kernel1 + c.patch_stride * (1 + rng() % 10);
    const std::size_t patches = (c.hist_len - c.kernel1) / c.patch_stride + 1;
    c.kernel2 = 1 + rng() % std::min<std::size_t>(3, patches);
    c.horizon = 1 + rng() % 24;
    c.n_targets = 1 + rng() % c.n_hist_vars;
    c.dropout = 0.0;
    model::ModelConfig r = c;
    r.n_forecast_vars = 1 + rng() % 3;
    r.forecast_len = 1 + rng() % 20;

    // Token count from the patching arithmetic, written out here.
    const std::size_t tokens = patches - c.kernel2 + 1 + r.n_forecast_vars;
    const std::size_t batch = 2;
    std::vector<Array> attn;
    model::ForwardOptions opts;
    opts.attention = &attn;
    Graph g;
    const model::BoundParams p = model::bind(g, model::init_params(r), false);
    const Tensor y = model::forward(r, p, g.constant(random_array({batch, r.n_hist_vars, r.hist_len}, rng)),
                                    g.constant(random_array({batch, r.n_forecast_vars, r.forecast_len}, rng)),
                                    opts);
    if (attn.size() != r.n_layers) ++violations;
    for (const Array& a : attn) {
      if (a.shape != ad::Shape{batch * r.n_heads, tokens, tokens}) {
        ++violations;
        continue;
      }
      for (std::size_t row = 0; row < a.size() / tokens; ++row) {
        double total = 0.0;
        for (std::size_t j = 0; j < tokens; ++j) total += a.values[row * tokens + j];
        worst_row = std::max(worst_row, std::abs(total - 1.0));
      }
    }
    if (y.shape() != ad::Shape{batch, r.n_targets, r.horizon}) ++violations;

    // Attention weights are identical with and without forecast tokens.
    std::map<std::string, ad::Shape> with, without;
    const model::ModelParams pr = model::init_params(r), pc = model::init_params(c);
    for (const auto& [name, a] : pr.tensors) {
      if (is_attention(name)) with[name] = a.shape;
    }
    for (const auto& [name, a] : pc.tensors) {
      if (is_attention(name)) without[name] = a.shape;
    }
    if (with != without || with.size() != 4 * c.n_layers) ++violations;
    if (model::encoder_parameter_count(r) != model::encoder_parameter_count(c)) ++violations;
    if (pr.count() != model::parameter_count(r) || pc.count() != model::parameter_count(c)) ++violations;
  }
  return {violations == 0 && worst_row <= 1e-12,
          fmt("20 configs: %zu law violations; worst attention row-sum error %.1e (bar 1e-12)", violations,
              worst_row)};
}

// ---------------------------------------------------------------------------
// Shared helpers for the training criteria

data::ProcessedDataset synth_dataset(cdm::SynthScenario s, const std::string& tag) {
  const fs::path dir = scratch(tag);
  cdm::write_synth(cdm::build_synth(s), dir);
  data::ProcessedDataset d = data::load_dataset(dir);
  fs::remove_all(dir);
  return d;
}

double cell_test_mse(const data::ProcessedDataset& d, data::RainConfig rc, std::size_t horizon,
                     std::uint64_t seed, train::TrainConfig tc) {
  const data::SeriesSet set = data::assemble(d, rc);
  const data::WindowShape w{data::kHistoryLength, horizon};
  model::ModelConfig base;
  base.seed = seed;
  const model::ModelConfig cfg = train::fit_config_to_data(base, set, w);
  tc.seed = seed;
  const train::FitResult fit = train::fit(cfg, model::init_params(cfg), set, w, tc);
  return train::split_mse(cfg, fit.best, set, data::Part::Test, w);
}

// ---------------------------------------------------------------------------
// 3. Overfit sanity

Outcome overfit_sanity() {
  cdm::SynthScenario s = cdm::SynthScenario::preset("SynthMid");
  s.n_nodes = 4;
  s.steps = 3000;
  const data::ProcessedDataset d = synth_dataset(s, "overfit");
  const data::SeriesSet set = data::assemble(d, data::RainConfig::RainFull);
  const data::WindowShape w{data::kHistoryLength, 96};
  const model::ModelConfig cfg = train::fit_config_to_data(model::ModelConfig{}, set, w);
  const std::vector<std::size_t> starts{0, 400, 800, 1200};
  const data::Batch batch = data::make_batch(set, starts, w);

  model::ModelParams params = model::init_params(cfg);
  train::AdamState state;
  const train::AdamConfig adam;
  std::mt19937_64 drop(7);
  auto mse = [&] {
    const Array pred = model::predict(cfg, params, batch.history, batch.forecast);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      total += (pred.values[i] - batch.target.values[i]) * (pred.values[i] - batch.target.values[i]);
    }
    return total / static_cast<double>(pred.size());
  };
  std::size_t step = 0;
  double loss = mse();
  while (step < 2000 && loss >= 1e-3) {
    train::train_step(cfg, params, state, batch, adam, &drop);
    ++step;
    if (step % 10 == 0 || step == 2000) loss = mse();
  }
  return {loss < 1e-3,
          fmt("default model (%zu params, dropout %.1f), 4 windows: train MSE %.2e after %zu steps "
              "(bar < 1e-3 within 2000)",
              model::parameter_count(cfg), cfg.dropout, loss, step)};
}

// ---------------------------------------------------------------------------
// 4. Exogenous benefit

Outcome exogenous_benefit() {
  train::TrainConfig tc;
  tc.max_epochs = 30;
  tc.max_batches_per_epoch = 64;
  tc.patience = 8;
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = true;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    cdm::SynthScenario s = cdm::SynthScenario::preset("SynthMid");
    s.n_nodes = 20;
    s.steps = 10000;
    s.seed = seed;
    const data::ProcessedDataset d = synth_dataset(s, "benefit");
    const double none = cell_test_mse(d, data::RainConfig::NoRain, 96, seed, tc);
    const double full = cell_test_mse(d, data::RainConfig::RainFull, 96, seed, tc);
    pass = pass && full <= 0.5 * none;
    detail += fmt("seed %llu NoRain %.4f RainFull %.4f ratio %.3f; ", static_cast<unsigned long long>(seed),
                  none, full, full / none);
  }
  const double elapsed = seconds_since(t0);
  pass = pass && elapsed < 1800.0;
  return {pass, detail + fmt("bar ratio <= 0.5; %.0f s (bar 1800 s)", elapsed)};
}

// ---------------------------------------------------------------------------
// 5. Horizon degradation

Outcome horizon_degradation() {
  train::TrainConfig tc;
  tc.max_epochs = 20;
  tc.max_batches_per_epoch = 32;
  tc.patience = 5;
  const std::vector<std::size_t> horizons{96, 192, 480, 720};
  const std::vector<data::RainConfig> configs{data::RainConfig::NoRain, data::RainConfig::RainHist,
                                              data::RainConfig::RainFull};
  std::vector<std::vector<double>> mean(configs.size(), std::vector<double>(horizons.size(), 0.0));
  const int seeds = 3;
  for (int seed = 0; seed < seeds; ++seed) {
    cdm::SynthScenario s = cdm::SynthScenario::preset("SynthLow");
    s.n_nodes = 4;
    s.steps = 30000;
    s.seed = static_cast<std::uint64_t>(seed);
    const data::ProcessedDataset d = synth_dataset(s, "horizon");
    for (std::size_t c = 0; c < configs.size(); ++c) {
      for (std::size_t h = 0; h < horizons.size(); ++h) {
        mean[c][h] += cell_test_mse(d, configs[c], horizons[h], static_cast<std::uint64_t>(seed), tc) / seeds;
      }
    }
  }
  bool pass = true;
  std::string detail;
  double worst = 0.0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    detail += data::config_label(configs[c]);
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      detail += fmt(" %.4f", mean[c][h]);
      if (h > 0) {
        const double drop = mean[c][h - 1] - mean[c][h];
        const double rel = drop / std::min(mean[c][h - 1], mean[c][h]);
        worst = std::max(worst, rel);
        pass = pass && rel <= 0.05;
      }
    }
    detail += "; ";
  }
  return {pass, detail + fmt("largest inversion %.1f%% (bar 5%%)", 100.0 * std::max(worst, 0.0))};
}

// ---------------------------------------------------------------------------
// 6. DTW oracle

Outcome dtw_oracle() {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_int_distribution<int> small(-3, 3);  // integer values force cost ties
  std::uniform_real_distribution<double> real(-2.0, 2.0);
  std::size_t mismatches = 0;
  for (int pair = 0; pair < 500; ++pair) {
    std::vector<double> x(static_cast<std::size_t>(len(rng))), y(static_cast<std::size_t>(len(rng)));
    const bool ints = pair % 2 == 0;
    for (double& v : x) v = ints ? small(rng) : real(rng);
    for (double& v : y) v = ints ? small(rng) : real(rng);
    const metrics::DtwAlignment dp = metrics::dtw_align(x, y);
    const metrics::DtwAlignment brute = check::dtw_brute_force(x, y);
    if (dp.distance != brute.distance || dp.path_length != brute.path_length) ++mismatches;
  }
  return {mismatches == 0, fmt("500 pairs, %zu differ from exhaustive enumeration (bar 0)", mismatches)};
}

// ---------------------------------------------------------------------------
// 7. Complexity extremes and oracle

// Series whose cyclic windows of three visit each ordinal pattern once.
std::vector<double> uniform_pattern_series() {
  std::vector<int> digits(6);
  for (int code = 0; code < 4096; ++code) {
    int c = code;
    for (int& d : digits) {
      d = c % 4;
      c /= 4;
    }
    std::set<std::size_t> seen;
    for (std::size_t t = 0; t < 6; ++t) {
      const std::vector<double> w{double(digits[t]), double(digits[(t + 1) % 6]), double(digits[(t + 2) % 6])};
      seen.insert(metrics::ordinal_pattern(w));
    }
    if (seen.size() == 6) break;
  }
  std::vector<double> series;
  for (int rep = 0; rep < 50; ++rep) series.insert(series.end(), digits.begin(), digits.end());
  series.push_back(digits[0]);
  series.push_back(digits[1]);
  return series;
}

Outcome complexity_extremes() {
  std::vector<double> ramp(500);
  std::iota(ramp.begin(), ramp.end(), -3.0);
  const auto mono = metrics::complexity(ramp, 6);

  const auto uni = metrics::complexity(uniform_pattern_series(), 3);

  std::vector<double> logistic(100000);
  logistic[0] = 0.4321;
  for (std::size_t i = 1; i < logistic.size(); ++i) logistic[i] = 4.0 * logistic[i - 1] * (1.0 - logistic[i - 1]);
  const auto got = metrics::complexity(logistic, 6);
  const auto want = check::direct_count_complexity(logistic, 6);
  const double dh = std::abs(got.entropy - want.entropy), dc = std::abs(got.complexity - want.complexity);

  const bool pass = mono.entropy == 0.0 && mono.complexity == 0.0 && std::abs(uni.entropy - 1.0) <= 1e-12 &&
                    std::abs(uni.complexity) <= 1e-12 && dh <= 1e-10 && dc <= 1e-10;
  return {pass, fmt("monotone H=%g C=%g (exact 0); uniform H-1=%.1e C=%.1e (bar 1e-12); logistic |dH|=%.1e "
                    "|dC|=%.1e (bar 1e-10)",
                    mono.entropy, mono.complexity, uni.entropy - 1.0, uni.complexity, dh, dc)};
}

// ---------------------------------------------------------------------------
// 8. Complexity ordering

Outcome complexity_ordering() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    double med[3];
    int k = 0;
    for (const char* name : {"SynthLow", "SynthMid", "SynthHigh"}) {
      cdm::SynthScenario s = cdm::SynthScenario::preset(name);
      s.n_nodes = 100;
      s.seed = seed;
      med[k++] = cdm::build_synth(s).median_complexity;
    }
    pass = pass && med[0] < med[1] && med[1] < med[2];
    detail += fmt("seed %llu: %.4f < %.4f < %.4f; ", static_cast<unsigned long long>(seed), med[0], med[1], med[2]);
  }
  return {pass, detail + "medians over 100 nodes (Low < Mid < High)"};
}

// ---------------------------------------------------------------------------
// 9. CDM conservation and LTI

Outcome cdm_conservation() {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Mass balance on a generated network and on a full synthetic run.
  const cdm::Terrain terrain = cdm::fractal_terrain({48, 48}, 10.0, {}, 9);
  const cdm::PipeNetwork net = cdm::generate_network(terrain, 150, 4, {}, 9);
  std::vector<std::vector<double>> in(150, std::vector<double>(800));
  double added = 0.0;
  for (auto& s : in) {
    for (double& v : s) added += v = u(rng) < 0.3 ? u(rng) : 0.0;
  }
  const cdm::Propagation prop = cdm::propagate_network(net, in);
  double balance = std::abs(prop.absorbed + prop.storage - added) / added;
  cdm::SynthScenario s = cdm::SynthScenario::preset("SynthMid");
  s.n_nodes = 20;
  const cdm::SynthDataset synth = cdm::build_synth(s);
  balance = std::max(balance, std::abs(synth.total_inflow - synth.absorbed - synth.storage) / synth.total_inflow);

  // Scaling by powers of two is exact in floating point, so any difference is
  // a nonlinearity.
  std::size_t scaling_failures = 0;
  for (double k : {2.0, 0.25, 8.0}) {
    std::vector<std::vector<double>> scaled = in;
    for (auto& row : scaled) {
      for (double& v : row) v *= k;
    }
    const auto a = prop.flow, b = cdm::propagate_network(net, scaled).flow;
    for (std::size_t v = 0; v < a.size(); ++v) {
      for (std::size_t t = 0; t < a[v].size(); ++t) scaling_failures += b[v][t] != k * a[v][t];
    }
  }
  cdm::WatershedLabels ws;
  ws.grid = {3, 3};
  ws.count = 3;
  ws.label = {0, 0, 1, 1, 2, 2, 0, 1, 2};
  std::vector<std::vector<double>> rain(400, std::vector<double>(9)), twice = rain;
  for (std::size_t t = 0; t < rain.size(); ++t) {
    for (std::size_t i = 0; i < 9; ++i) twice[t][i] = 2.0 * (rain[t][i] = u(rng));
  }
  const auto wa = cdm::watershed_accumulate(ws, rain, {2.0, 7.0, 30.0});
  const auto wb = cdm::watershed_accumulate(ws, twice, {2.0, 7.0, 30.0});
  for (std::size_t t = 0; t < wa.size(); ++t) {
    for (std::size_t k = 0; k < 3; ++k) scaling_failures += wb[t][k] != 2.0 * wa[t][k];
  }

  // Random 20-node DAGs against path enumeration and convolution.
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 20, steps = 150;
    cdm::PipeNetwork dag;
    dag.nodes.resize(n);
    std::vector<check::OracleEdge> edges;
    for (std::size_t v = 0; v + 3 < n; ++v) {
      const std::size_t fanout = 1 + (u(rng) < 0.35);
      for (std::size_t k = 0; k < fanout; ++k) {
        cdm::Pipe p;
        p.from = v;
        p.to = std::min(n - 1, v + 1 + static_cast<std::size_t>(u(rng) * double(n - v - 1)));
        p.gain = 0.2 + 0.8 * u(rng);
        p.tau = u(rng) < 0.2 ? 0.0 : 5.0 * u(rng);
        p.delay = static_cast<std::size_t>(7 * u(rng));
        dag.pipes.push_back(p);
        edges.push_back({p.from, p.to, p.gain, p.tau, p.delay});
      }
    }
    dag.terminals = {n - 3, n - 2, n - 1};
    std::vector<std::vector<double>> src(n, std::vector<double>(steps));
    for (auto& row : src) {
      for (double& v : row) v = u(rng) < 0.2 ? u(rng) : 0.0;
    }
    const auto got = cdm::propagate_network(dag, src).flow;
    const auto want = check::path_convolution(n, edges, src);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t t = 0; t < steps; ++t) worst = std::max(worst, std::abs(got[v][t] - want[v][t]));
    }
  }
  return {balance <= 1e-6 && scaling_failures == 0 && worst <= 1e-9,
          fmt("mass balance %.1e (bar 1e-6 relative); %zu inexact scaled samples (bar 0); DAG oracle max "
              "diff %.1e over 20 DAGs (bar 1e-9)",
              balance, scaling_failures, worst)};
}

// ---------------------------------------------------------------------------
// 10. Pipeline correctness

Outcome pipeline_correctness() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double spline_worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 20 + rng() % 100;
    std::vector<double> v(n);
    std::vector<bool> mask(n, false);
    for (double& x : v) x = u(rng);
    // Holes come in runs, never at the ends.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (unit(rng) < 0.08) {
        const std::size_t run = 1 + rng() % 6;
        for (std::size_t k = i; k < std::min(n - 1, i + run); ++k) mask[k] = true;
      }
    }
    std::vector<double> x, y, at;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) {
        at.push_back(double(i));
      } else {
        x.push_back(double(i));
        y.push_back(v[i]);
      }
    }
    if (x.size() < 4) continue;
    const auto got = data::spline_fill(std::span<const double>(v), mask);
    const auto want = check::dense_natural_spline(x, y, at);
    for (std::size_t k = 0; k < at.size(); ++k) {
      spline_worst = std::max(spline_worst, std::abs(got[static_cast<std::size_t>(at[k])] - want[k]));
    }
  }

  std::size_t sum_mismatches = 0;
  std::exponential_distribution<double> rain(0.8);
  for (int trial = 0; trial < 200; ++trial) {
    data::RawSeries p;
    p.sensor = "precipitation";
    p.kind = data::MetricKind::Precipitation;
    p.resolution_minutes = 60;
    const std::size_t hours = 1 + rng() % 500;
    for (std::size_t i = 0; i < hours; ++i) {
      p.timestamps.push_back(1704067200 + static_cast<std::int64_t>(i) * 3600);
      p.values.push_back(unit(rng) < 0.6 ? 0.0 : rain(rng));
    }
    const data::RawSeries q = data::upsample_precip(p);
    const double before = std::accumulate(p.values.begin(), p.values.end(), 0.0);
    const double after = std::accumulate(q.values.begin(), q.values.end(), 0.0);
    sum_mismatches += before != after || q.size() != 4 * hours;
  }

  std::size_t straddles = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    data::Split s;
    s.total = 300 + rng() % 5000;
    s.train_end = rng() % s.total;
    s.val_end = s.train_end + rng() % (s.total - s.train_end + 1);
    const data::WindowShape w{data::kHistoryLength, 1 + rng() % 720};
    for (data::Part part : {data::Part::Train, data::Part::Val, data::Part::Test}) {
      const auto [lo, hi] = data::part_range(s, part);
      for (std::size_t start : data::window_starts(lo, hi, w)) {
        straddles += start < lo || start + w.span() > hi;
      }
      // Every boundary belongs to exactly one part.
      if (part == data::Part::Train) straddles += lo != 0 || hi != s.train_end;
      if (part == data::Part::Val) straddles += lo != s.train_end || hi != s.val_end;
      if (part == data::Part::Test) straddles += lo != s.val_end || hi != s.total;
    }
  }
  return {spline_worst <= 1e-9 && sum_mismatches == 0 && straddles == 0,
          fmt("spline vs dense solve max diff %.1e (bar 1e-9); %zu/200 upsampled sums differ (bar 0); %zu "
              "straddling windows over 1000 splits (bar 0)",
              spline_worst, sum_mismatches, straddles)};
}

// ---------------------------------------------------------------------------
// 11. Determinism

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> contents of every report file under `root`. The run index
// is skipped: it records when the run happened.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() != "run.json") {
      out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
  }
  return out;
}

Outcome determinism() {
  const fs::path dir = scratch("determinism");
  std::ofstream(dir / "scenario.json")
      << R"({"preset":"SynthLow","grid":{"rows":32,"cols":32},"steps":10000,"network":{"nodes":60},"n_nodes":3})";
  std::ofstream(dir / "config.json")
      << R"({"model":{"d_model":16,"n_layers":1,"n_heads":2,"d_ff":32},"train":{"max_epochs":2,"max_batches_per_epoch":4}})";
  std::vector<std::map<std::string, std::string>> reports;
  for (int run = 1; run <= 2; ++run) {
    fs::remove_all(dir / "grid");
    std::ostringstream out, err;
    const int code = cli::run({"grid", "--scenario", (dir / "scenario.json").string(), "--config",
                               (dir / "config.json").string(), "--seed", "3", "--out", (dir / "grid").string()},
                              out, err);
    if (code != 0) return {false, fmt("grid run %d exited %d: %s", run, code, err.str().c_str())};
    reports.push_back(tree(dir / "grid" / "report"));
  }
  std::size_t differing = 0;
  for (const auto& [name, body] : reports[0]) {
    const auto it = reports[1].find(name);
    differing += it == reports[1].end() || it->second != body;
  }
  differing += reports[1].size() > reports[0].size() ? reports[1].size() - reports[0].size() : 0;
  const std::size_t rows = std::count(reports[0]["report.csv"].begin(), reports[0]["report.csv"].end(), '\n');
  fs::remove_all(dir);
  return {differing == 0 && rows > 1,
          fmt("two seeded 3x4 grid runs: %zu report files, %zu differ (bar 0); report.csv has %zu lines",
              reports[0].size(), differing, rows)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Training allocates large short-lived buffers; keep them on the heap.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  const std::vector<Criterion> criteria{
      {1, "gradient soundness", gradient_soundness},
      {2, "architecture laws", architecture_laws},
      {3, "overfit sanity", overfit_sanity},
      {4, "exogenous benefit", exogenous_benefit},
      {5, "horizon degradation", horizon_degradation},
      {6, "DTW oracle", dtw_oracle},
      {7, "complexity extremes", complexity_extremes},
      {8, "complexity ordering", complexity_ordering},
      {9, "CDM conservation and LTI", cdm_conservation},
      {10, "pipeline correctness", pipeline_correctness},
      {11, "determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (*end != '\0' || id < 1 || id > static_cast<long>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], criteria.size());
      return 2;
    }
    selected.insert(static_cast<int>(id));
  }

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %2d  %-26s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
