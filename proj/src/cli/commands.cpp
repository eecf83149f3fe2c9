// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "aquacast/cli/report.hpp"
#include "aquacast/data/csv.hpp"
#include "aquacast/errors.hpp"
#include "aquacast/model/checkpoint.hpp"

#if defined(__unix__)
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace aquacast::cli {

namespace {

std::string safe_name(std::string s) {
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw InputError("cannot write " + path.string());
}

}  // namespace

std::string cell_name(data::RainConfig rain, std::size_t horizon) {
  return data::config_label(rain) + "_h" + std::to_string(horizon);
}

nlohmann::json cmd_preprocess(const fs::path& input, const fs::path& out, std::ostream& log) {
  const auto entries = data::discover_dataset(input);
  const data::ProcessedDataset d = data::load_dataset(input);
  if (d.length() == 0) throw InputError("the input series share no common time span");
  fs::create_directories(out / "series");

  std::vector<data::SeriesEntry> processed;
  std::vector<fs::path> outputs;
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& ch : d.channels) {
    data::RawSeries s;
    s.sensor = ch.name;
    s.kind = ch.kind;
    s.resolution_minutes = data::kGridMinutes;
    s.values = ch.values;
    for (std::size_t i = 0; i < ch.values.size(); ++i) {
      s.timestamps.push_back(d.start + static_cast<std::int64_t>(i) * data::kGridSeconds);
    }
    const fs::path file = fs::path("series") / (safe_name(ch.name) + ".csv");
    data::write_series_csv(s, out / file);
    processed.push_back({file, ch.name, ch.kind});
    outputs.push_back(out / file);

    const data::Summary sum = data::summarize(ch.values);
    std::string hist = "bin_lo,bin_hi,density\n";
    for (std::size_t b = 0; b < sum.density.size(); ++b) {
      char line[96];
      std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g\n", sum.lo + b * sum.bin_width,
                    sum.lo + (b + 1) * sum.bin_width, sum.density[b]);
      hist += line;
    }
    const fs::path hist_file = fs::path("histograms") / (safe_name(ch.name) + ".csv");
    write_text(out / hist_file, hist);
    outputs.push_back(out / hist_file);
    summaries.push_back({{"name", ch.name},
                         {"mean", sum.mean},
                         {"std", sum.std},
                         {"histogram", hist_file.generic_string()}});
    log << ch.name << "  mean " << sum.mean << "  std " << sum.std << "  histogram "
        << hist_file.generic_string() << '\n';
  }
  data::write_dataset_index(out, processed);
  outputs.push_back(out / "dataset.json");

  nlohmann::json manifest = data::dataset_manifest(d, data::Split::ratio_70_10_20(d.length()),
                                                   processed);
  manifest["summary"] = summaries;
  write_json(out / "manifest.json", manifest);
  outputs.push_back(out / "manifest.json");
  const std::string hash = hex64(fnv1a(manifest.dump()));
  log << d.channels.size() << " channels, " << d.length() << " steps, manifest " << hash << '\n';

  nlohmann::json args{{"dataset_root", input.generic_string()}, {"manifest_hash", hash}};
  write_run_index(out, "preprocess", args, outputs);
  return args;
}

cdm::SynthScenario load_scenario(const std::string& scenario) {
  if (scenario == "SynthLow" || scenario == "SynthMid" || scenario == "SynthHigh") {
    return cdm::SynthScenario::preset(scenario);
  }
  if (!fs::exists(scenario)) {
    throw InputError("scenario '" + scenario +
                     "' is neither a file nor one of SynthLow, SynthMid, SynthHigh");
  }
  return cdm::scenario_from_json(read_json(scenario));
}

nlohmann::json cmd_synth(const cdm::SynthScenario& s, const fs::path& out, std::ostream& log) {
  s.validate();
  const cdm::SynthDataset d = cdm::build_synth(s);
  cdm::write_synth(d, out);
  std::vector<fs::path> outputs;
  for (const auto& name : d.node_names) outputs.push_back(out / (name + ".csv"));
  for (const char* f : {"precipitation.csv", "dataset.json", "synth.json"}) {
    outputs.push_back(out / f);
  }
  log << s.name << " (" << cdm::cloud_kind_name(s.source) << "): " << d.node_names.size()
      << " nodes, " << s.steps << " steps, median complexity " << d.median_complexity << '\n';
  nlohmann::json args{{"scenario", s}, {"median_complexity", d.median_complexity}};
  write_run_index(out, "synth", args, outputs);
  return args;
}

nlohmann::json cmd_train(const ExperimentSpec& spec, std::ostream& log) {
  spec.validate();
  const data::ProcessedDataset d = data::load_dataset(spec.dataset_root);
  const data::SeriesSet set = data::assemble(d, spec.rain, spec.overrides.targets);
  const data::WindowShape w{data::kHistoryLength, spec.horizon};

  model::ModelConfig base = spec.overrides.model;
  base.seed = spec.seed;
  const model::ModelConfig cfg = train::fit_config_to_data(base, set, w);
  train::TrainConfig tc = spec.overrides.train;
  tc.seed = spec.seed;
  tc.validate();

  log << cell_name(spec.rain, spec.horizon) << ": V=" << cfg.n_hist_vars
      << " F=" << cfg.n_forecast_vars << " targets=" << cfg.n_targets << " parameters "
      << model::parameter_count(cfg) << '\n';
  const train::FitResult fit =
      train::fit(cfg, model::init_params(cfg), set, w, tc, [&](const train::EpochRecord& r) {
        log << "  epoch " << r.epoch << "  train " << r.train_loss << "  val " << r.val_loss
            << '\n';
      });
  log << "  best epoch " << fit.best_epoch << "  val " << fit.best_val_loss << '\n';

  fs::create_directories(spec.out);
  std::vector<std::string> targets;
  for (std::size_t t : set.targets) targets.push_back(set.history_names[t]);
  model::Checkpoint ck{cfg, fit.best, {}};
  ck.meta = {{"dataset_root", fs::absolute(spec.dataset_root).lexically_normal().generic_string()},
             {"rain", data::rain_name(spec.rain)},
             {"horizon", spec.horizon},
             {"hist_len", w.hist_len},
             {"history_channels", set.history_names},
             {"targets", targets},
             {"standardizer", set.stats},
             {"units", train::units_name(spec.overrides.units)},
             {"seed", spec.seed}};
  model::save_checkpoint(ck, spec.out / "checkpoint.bin");

  nlohmann::json manifest = train::run_manifest(cfg, tc, set, w, fit);
  manifest["dataset_root"] = ck.meta["dataset_root"];
  write_json(spec.out / "manifest.json", manifest);

  nlohmann::json args{{"dataset_root", spec.dataset_root.generic_string()},
                      {"rain", data::rain_name(spec.rain)},
                      {"horizon", spec.horizon},
                      {"seed", spec.seed},
                      {"config", to_json(spec.overrides)}};
  write_run_index(spec.out, "train", args,
                  {spec.out / "checkpoint.bin", spec.out / "manifest.json"});
  return args;
}

nlohmann::json cmd_eval(const EvalArgs& a, std::ostream& log) {
  if (a.out.empty()) throw UserError("--out is required");
  const model::Checkpoint ck = model::load_checkpoint(a.checkpoint);
  const auto& meta = ck.meta;
  for (const char* key : {"dataset_root", "rain", "horizon", "hist_len", "history_channels",
                          "targets", "standardizer", "units"}) {
    if (!meta.contains(key)) {
      throw InputError(a.checkpoint.string() + " lacks '" + key + "'; was it written by train?");
    }
  }
  const fs::path root =
      a.dataset_root.empty() ? fs::path(meta["dataset_root"].get<std::string>()) : a.dataset_root;
  const auto rain = data::parse_rain(meta["rain"].get<std::string>());
  const data::WindowShape w{meta["hist_len"].get<std::size_t>(), meta["horizon"].get<std::size_t>()};
  const train::Units units =
      a.units ? *a.units : train::parse_units(meta["units"].get<std::string>());

  const data::ProcessedDataset d = data::load_dataset(root);
  const data::SeriesSet set =
      data::assemble(d, rain, meta["targets"].get<std::vector<std::string>>());
  if (set.history_names != meta["history_channels"].get<std::vector<std::string>>()) {
    throw ConfigError("dataset channels do not match the checkpoint's history channels");
  }
  // Destandardizing needs the statistics the model was trained against.
  if (set.stats.names != meta["standardizer"].get<data::Standardizer>().names) {
    throw ConfigError("dataset standardizer does not match the checkpoint");
  }

  const train::Evaluation e = train::evaluate(ck.config, ck.params, set, a.split, w, units);

  // One sample per target: the non-overlapping window with the widest truth range.
  nlohmann::json samples = nlohmann::json::array();
  const auto& starts = e.predictions.starts;
  const std::size_t nt = set.targets.size(), h = w.horizon;
  for (std::size_t k = 0; k < nt; ++k) {
    std::size_t best = 0;
    double best_range = -1.0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      if ((starts[i] - starts[0]) % h != 0) continue;
      const double* truth = &e.predictions.truth.values[(i * nt + k) * h];
      const auto [lo, hi] = std::minmax_element(truth, truth + h);
      if (*hi - *lo > best_range) {
        best_range = *hi - *lo;
        best = i;
      }
    }
    const std::size_t c = set.targets[k];
    std::vector<double> history(set.history[c].begin() + static_cast<std::ptrdiff_t>(starts[best]),
                                set.history[c].begin() +
                                    static_cast<std::ptrdiff_t>(starts[best] + w.hist_len));
    if (units == train::Units::Original) history = set.stats.destandardize(c, history);
    const double* truth = &e.predictions.truth.values[(best * nt + k) * h];
    const double* pred = &e.predictions.pred.values[(best * nt + k) * h];
    samples.push_back(
        {{"sensor", set.history_names[c]},
         {"start", data::format_timestamp(set.start + static_cast<std::int64_t>(
                                                          starts[best] + w.hist_len) *
                                                          data::kGridSeconds)},
         {"history", history},
         {"truth", std::vector<double>(truth, truth + h)},
         {"forecast", std::vector<double>(pred, pred + h)}});
  }

  nlohmann::json doc{{"config", data::config_label(rain)},
                     {"rain", data::rain_name(rain)},
                     {"horizon", h},
                     {"metrics", train::evaluation_json(e)},
                     {"samples", samples}};
  write_json(a.out / "eval.json", doc);
  for (const auto& t : e.targets) {
    log << "  " << t.name << "  mse " << t.point.mse << "  mae " << t.point.mae << "  auc "
        << t.accuracy.auc << '\n';
  }
  nlohmann::json args{{"checkpoint", a.checkpoint.generic_string()},
                      {"dataset_root", root.generic_string()},
                      {"split", data::part_name(a.split)},
                      {"units", train::units_name(units)}};
  write_run_index(a.out, "eval", args, {a.out / "eval.json"});
  return args;
}

nlohmann::json cmd_report(const std::vector<fs::path>& inputs, const fs::path& out,
                          std::ostream& log) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().filename() == "eval.json") files.push_back(e.path());
      }
    } else if (fs::is_regular_file(in)) {
      files.push_back(in);
    } else {
      throw InputError("no such evaluation: " + in.string());
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  if (files.empty()) throw InputError("no eval.json found in the given inputs");

  std::vector<nlohmann::json> evals;
  for (const auto& f : files) evals.push_back(read_json(f));
  std::vector<ReportRow> rows;
  std::vector<ForecastSample> samples;
  try {
    rows = collect_rows(evals);
    samples = collect_samples(evals);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed evaluation: ") + e.what());
  }

  fs::create_directories(out);
  std::vector<fs::path> outputs{out / "report.csv", out / "report.json"};
  write_text(out / "report.csv", table_csv(rows));
  write_json(out / "report.json", {{"rows", table_json(rows)}});
  for (const auto& s : samples) {
    const fs::path p = out / "plots" / sample_file_name(s);
    write_text(p, forecast_svg(s));
    outputs.push_back(p);
  }
  log << rows.size() << " rows, " << samples.size() << " plots from " << files.size()
      << " evaluations\n";
  nlohmann::json args{{"evaluations", evals.size()}};
  write_run_index(out, "report", args, outputs);
  return args;
}

namespace {

void run_cell(const ExperimentSpec& spec, std::ostream& log) {
  cmd_train(spec, log);
  cmd_eval({spec.out / "checkpoint.bin", spec.dataset_root, data::Part::Test, std::nullopt,
            spec.out},
           log);
}

}  // namespace

nlohmann::json cmd_grid(const GridArgs& a, std::ostream& log) {
  if (a.base.out.empty()) throw UserError("--out is required");
  if (a.jobs == 0) throw UserError("--jobs must be at least 1");
  fs::path root = a.base.dataset_root;
  if (a.scenario) {
    root = a.base.out / "dataset";
    cmd_synth(*a.scenario, root, log);
  }

  std::vector<ExperimentSpec> cells;
  for (std::size_t h : a.horizons) {
    for (data::RainConfig r : a.rains) {
      ExperimentSpec s = a.base;
      s.dataset_root = root;
      s.rain = r;
      s.horizon = h;
      s.out = a.base.out / "cells" / cell_name(r, h);
      s.validate();
      cells.push_back(std::move(s));
    }
  }

#if defined(__unix__)
  if (a.jobs > 1) {
    // Each cell runs in a forked worker that logs to its own directory.
    log.flush();
    std::map<pid_t, std::size_t> running;
    std::vector<int> status(cells.size(), 0);
    std::size_t next = 0;
    while (next < cells.size() || !running.empty()) {
      while (next < cells.size() && running.size() < a.jobs) {
        fs::create_directories(cells[next].out);
        const pid_t pid = fork();
        if (pid < 0) throw ContractError("fork failed");
        if (pid == 0) {
          int code = 0;
          std::ofstream cell_log(cells[next].out / "log.txt");
          try {
            run_cell(cells[next], cell_log);
          } catch (const UserError& e) {
            cell_log << "error: " << e.what() << '\n';
            code = 2;
          } catch (const std::exception& e) {
            cell_log << "internal error: " << e.what() << '\n';
            code = 3;
          }
          cell_log.flush();
          _exit(code);
        }
        running[pid] = next++;
      }
      int st = 0;
      const pid_t done = waitpid(-1, &st, 0);
      if (done < 0) throw ContractError("waitpid failed");
      const std::size_t i = running.at(done);
      running.erase(done);
      status[i] = WIFEXITED(st) ? WEXITSTATUS(st) : 3;
      log << cells[i].out.filename().string() << (status[i] == 0 ? " done" : " failed") << '\n';
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string where = (cells[i].out / "log.txt").string();
      if (status[i] == 2) throw UserError("cell " + cells[i].out.filename().string() +
                                          " failed; see " + where);
      if (status[i] != 0) throw ContractError("cell " + cells[i].out.filename().string() +
                                              " failed; see " + where);
    }
  } else
#endif
  {
    for (const auto& c : cells) run_cell(c, log);
  }

  cmd_report({a.base.out / "cells"}, a.base.out / "report", log);

  nlohmann::json horizons = a.horizons, rains = nlohmann::json::array();
  for (auto r : a.rains) rains.push_back(data::rain_name(r));
  nlohmann::json args{{"dataset_root", root.generic_string()},
                      {"horizons", horizons},
                      {"rain", rains},
                      {"seed", a.base.seed},
                      {"jobs", a.jobs},
                      {"config", to_json(a.base.overrides)}};
  if (a.scenario) args["scenario"] = *a.scenario;
  std::vector<fs::path> outputs;
  for (const auto& c : cells) outputs.push_back(c.out);
  outputs.push_back(a.base.out / "report");
  write_run_index(a.base.out, "grid", args, outputs);
  return args;
}

}  // namespace aquacast::cli
