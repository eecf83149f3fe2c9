// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cli/app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <optional>

#include "aquacast/cli/commands.hpp"
#include "aquacast/errors.hpp"

namespace aquacast::cli {

namespace {

data::Part parse_part(const std::string& s) {
  if (s == "train") return data::Part::Train;
  if (s == "val") return data::Part::Val;
  if (s == "test") return data::Part::Test;
  throw UserError("--split must be train, val or test");
}

struct Options {
  std::string dataset_root, scenario, config, out, checkpoint, split = "test", units;
  std::string horizon = "96", rain = "full";  // train takes a single cell
  std::vector<std::string> horizons, rains, inputs;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
};

/// Dataset root for train/grid: either given, or a scenario synthesized into `<out>/dataset`.
fs::path dataset_for(const Options& o, std::ostream& out) {
  if (!o.dataset_root.empty() && !o.scenario.empty()) {
    throw UserError("pass either --dataset-root or --scenario, not both");
  }
  if (!o.scenario.empty()) {
    cdm::SynthScenario s = load_scenario(o.scenario);
    if (o.seed || std::getenv("AQUACAST_SEED")) s.seed = resolve_seed(o.seed);
    const fs::path root = fs::path(o.out) / "dataset";
    cmd_synth(s, root, out);
    return root;
  }
  return o.dataset_root;
}

int dispatch(CLI::App& app, const Options& o, std::ostream& out) {
  const std::string cmd = app.get_subcommands().front()->get_name();
  if (o.out.empty()) throw UserError("--out is required");
  if (cmd == "preprocess") {
    cmd_preprocess(o.dataset_root, o.out, out);
  } else if (cmd == "synth") {
    cdm::SynthScenario s = load_scenario(o.scenario);
    if (o.seed || std::getenv("AQUACAST_SEED")) s.seed = resolve_seed(o.seed);
    cmd_synth(s, o.out, out);
  } else if (cmd == "train") {
    ExperimentSpec spec;
    spec.overrides = read_overrides(o.config);
    spec.rain = data::parse_rain(o.rain);
    spec.horizon = parse_horizon(o.horizon);
    spec.seed = resolve_seed(o.seed);
    spec.out = o.out;
    spec.dataset_root = dataset_for(o, out);
    cmd_train(spec, out);
  } else if (cmd == "eval") {
    EvalArgs a;
    a.checkpoint = o.checkpoint;
    a.dataset_root = o.dataset_root;
    a.split = parse_part(o.split);
    if (!o.units.empty()) a.units = train::parse_units(o.units);
    a.out = o.out;
    cmd_eval(a, out);
  } else if (cmd == "report") {
    cmd_report({o.inputs.begin(), o.inputs.end()}, o.out, out);
  } else if (cmd == "grid") {
    GridArgs g;
    g.base.overrides = read_overrides(o.config);
    g.base.seed = resolve_seed(o.seed);
    g.base.out = o.out;
    g.jobs = o.jobs;
    if (!o.scenario.empty()) {
      if (!o.dataset_root.empty()) throw UserError("pass either --dataset-root or --scenario");
      g.scenario = load_scenario(o.scenario);
      if (o.seed || std::getenv("AQUACAST_SEED")) g.scenario->seed = g.base.seed;
    } else {
      g.base.dataset_root = o.dataset_root;
    }
    if (!o.horizons.empty()) {
      g.horizons.clear();
      for (const auto& h : o.horizons) g.horizons.push_back(parse_horizon(h));
    }
    if (!o.rains.empty()) {
      g.rains.clear();
      for (const auto& r : o.rains) g.rains.push_back(data::parse_rain(r));
    }
    cmd_grid(g, out);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AquaCast: multi-input transformer forecasting for urban drainage"};
  app.name("aquacast");
  app.require_subcommand(1);
  Options o;

  auto* pre = app.add_subcommand("preprocess", "Clean and align a directory of sensor CSVs");
  pre->add_option("--dataset-root", o.dataset_root, "Input directory")->required();
  pre->add_option("--out", o.out, "Output dataset directory")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic drainage dataset");
  synth->add_option("--scenario", o.scenario, "Scenario JSON or SynthLow/SynthMid/SynthHigh")
      ->required();
  synth->add_option("--seed", o.seed, "Overrides the scenario seed");
  synth->add_option("--out", o.out, "Output dataset directory")->required();

  const std::vector<std::string> rain_choices{"none", "hist", "full"};
  auto* train = app.add_subcommand("train", "Train one rain config x horizon cell");
  train->add_option("--dataset-root", o.dataset_root, "Dataset directory");
  train->add_option("--scenario", o.scenario, "Synthesize this scenario into <out>/dataset first");
  train->add_option("--config", o.config, "JSON overrides: model, train, targets, units");
  train->add_option("--horizon", o.horizon, "96, 192, 480 or 720")->capture_default_str();
  train->add_option("--rain", o.rain, "Exogenous configuration")
      ->capture_default_str()
      ->check(CLI::IsMember(rain_choices));
  train->add_option("--seed", o.seed, "Seed (falls back to AQUACAST_SEED, then 0)");
  train->add_option("--out", o.out, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  eval->add_option("--checkpoint", o.checkpoint, "checkpoint.bin written by train")->required();
  eval->add_option("--dataset-root", o.dataset_root, "Defaults to the training dataset");
  eval->add_option("--split", o.split, "train, val or test")
      ->check(CLI::IsMember({"train", "val", "test"}));
  eval->add_option("--units", o.units, "standardized or original")
      ->check(CLI::IsMember({"standardized", "original"}));
  eval->add_option("--out", o.out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Combine evaluations into a table and plots");
  report->add_option("inputs", o.inputs, "eval.json files or directories holding them")
      ->required();
  report->add_option("--out", o.out, "Output directory")->required();

  auto* grid = app.add_subcommand("grid", "Train, evaluate and report every rain x horizon cell");
  grid->add_option("--dataset-root", o.dataset_root, "Dataset directory");
  grid->add_option("--scenario", o.scenario, "Synthesize this scenario into <out>/dataset first");
  grid->add_option("--config", o.config, "JSON overrides: model, train, targets, units");
  grid->add_option("--horizon", o.horizons, "Subset of 96, 192, 480, 720 (default all)");
  grid->add_option("--rain", o.rains, "Subset of none, hist, full (default all)")
      ->check(CLI::IsMember(rain_choices));
  grid->add_option("--seed", o.seed, "Seed (falls back to AQUACAST_SEED, then 0)");
  grid->add_option("--jobs", o.jobs, "Worker processes")->check(CLI::PositiveNumber);
  grid->add_option("--out", o.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  }

  try {
    return dispatch(app, o, out);
  } catch (const UserError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid JSON input: " << e.what() << '\n';
    return kExitUser;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const ContractError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace aquacast::cli
