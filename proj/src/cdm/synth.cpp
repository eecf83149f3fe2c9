// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cdm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "aquacast/data/csv.hpp"
#include "aquacast/data/dataset.hpp"
#include "aquacast/data/preprocess.hpp"
#include "aquacast/errors.hpp"
#include "aquacast/metrics/complexity.hpp"

namespace aquacast::cdm {

using nlohmann::json;

SynthScenario SynthScenario::preset(const std::string& name) {
  SynthScenario s;
  s.name = name;
  if (name == "SynthLow") {
    s.source = CloudKind::Records;
  } else if (name == "SynthMid") {
    s.source = CloudKind::Lorenz;
  } else if (name == "SynthHigh") {
    s.source = CloudKind::RandomField;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected SynthLow, SynthMid or SynthHigh)");
  }
  return s;
}

void SynthScenario::validate() const {
  if (grid.rows < 2 || grid.cols < 2) throw ConfigError("scenario grid must be at least 2x2");
  if (!(cellsize > 0.0)) throw ConfigError("scenario cellsize must be positive");
  if (steps == 0) throw ConfigError("scenario steps must be positive");
  if (n_nodes == 0 || n_nodes > network_nodes) {
    throw ConfigError("n_nodes must lie in [1, network_nodes] (" + std::to_string(n_nodes) + " > " +
                      std::to_string(network_nodes) + ")");
  }
  if (terminals == 0 || terminals > network_nodes) throw ConfigError("terminals must lie in [1, network_nodes]");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (baseflow < 0.0 || diurnal < 0.0 || diurnal > 1.0) {
    throw ConfigError("baseflow must be >= 0 and diurnal in [0, 1]");
  }
  if (!(watershed.slow_fraction >= 0.0 && watershed.slow_fraction <= 1.0) ||
      !(watershed.tau_slow > 0.0)) {
    throw ConfigError("watershed slow_fraction must lie in [0, 1] and tau_slow be positive");
  }
  if (!(random_field.length > 0.0)) throw ConfigError("random_field.length must be positive");
  if (!(lorenz.dt > 0.0) || lorenz.substeps == 0) throw ConfigError("lorenz dt and substeps must be positive");
}

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }
  template <typename T>
  void get(const char* key, T& field) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      j_.at(key).get_to(field);
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown scenario key '" + where_ + "." + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> load_records(const SynthScenario& s) {
  const auto raw = data::read_series_csv(s.records_file, "records", data::MetricKind::Precipitation);
  data::PipelineLog log;
  auto series = data::preprocess_series(raw, log).values;
  if (series.size() < s.steps) {
    throw InputError(s.records_file + ": " + std::to_string(series.size()) +
                     " steps after preprocessing, scenario needs " + std::to_string(s.steps));
  }
  series.resize(s.steps);
  return series;
}

}  // namespace

void to_json(json& j, const SynthScenario& s) {
  j = json{{"name", s.name},
           {"source", cloud_kind_name(s.source)},
           {"grid", {{"rows", s.grid.rows}, {"cols", s.grid.cols}}},
           {"cellsize", s.cellsize},
           {"terrain",
            {{"base", s.terrain.base},
             {"amplitude", s.terrain.amplitude},
             {"roughness", s.terrain.roughness},
             {"file", s.terrain_file}}},
           {"detail", s.detail},
           {"watershed",
            {{"tau_flat", s.watershed.tau_flat},
             {"slope_ref", s.watershed.slope_ref},
             {"slow_fraction", s.watershed.slow_fraction},
             {"tau_slow", s.watershed.tau_slow}}},
           {"network",
            {{"nodes", s.network_nodes},
             {"terminals", s.terminals},
             {"delay_per_metre", s.pipes.delay_per_metre},
             {"tau_base", s.pipes.tau_base},
             {"tau_per_metre", s.pipes.tau_per_metre}}},
           {"n_nodes", s.n_nodes},
           {"steps", s.steps},
           {"seed", s.seed},
           {"kappa", s.kappa},
           {"baseflow", s.baseflow},
           {"diurnal", s.diurnal},
           {"records",
            {{"drift", s.records.drift},
             {"origin", s.records.origin},
             {"radius", s.records.radius},
             {"p_wet_after_dry", s.record_generator.p_wet_after_dry},
             {"p_wet_after_wet", s.record_generator.p_wet_after_wet},
             {"mean_wet_total", s.record_generator.mean_wet_total},
             {"file", s.records_file}}},
           {"lorenz",
            {{"sigma", s.lorenz.sigma},
             {"rho", s.lorenz.rho},
             {"beta", s.lorenz.beta},
             {"dt", s.lorenz.dt},
             {"substeps", s.lorenz.substeps},
             {"initial", s.lorenz.initial},
             {"radius", s.lorenz.radius},
             {"mass_scale", s.lorenz.mass_scale}}},
           {"random_field",
            {{"length", s.random_field.length},
             {"variance", s.random_field.variance},
             {"mean", s.random_field.mean},
             {"drift", s.random_field.drift},
             {"phase_rate", s.random_field.phase_rate},
             {"scale", s.random_field.scale}}}};
}

SynthScenario scenario_from_json(const json& j) {
  Reader top(j, "scenario");
  std::string preset = "SynthMid";
  top.get("preset", preset);
  SynthScenario s = SynthScenario::preset(preset);
  top.get("name", s.name);
  std::string source = cloud_kind_name(s.source);
  top.get("source", source);
  s.source = parse_cloud_kind(source);
  if (const json* g = top.child("grid")) {
    Reader r(*g, "grid");
    r.get("rows", s.grid.rows);
    r.get("cols", s.grid.cols);
    r.finish();
  }
  top.get("cellsize", s.cellsize);
  if (const json* t = top.child("terrain")) {
    Reader r(*t, "terrain");
    r.get("base", s.terrain.base);
    r.get("amplitude", s.terrain.amplitude);
    r.get("roughness", s.terrain.roughness);
    r.get("file", s.terrain_file);
    r.finish();
  }
  top.get("detail", s.detail);
  if (const json* w = top.child("watershed")) {
    Reader r(*w, "watershed");
    r.get("tau_flat", s.watershed.tau_flat);
    r.get("slope_ref", s.watershed.slope_ref);
    r.get("slow_fraction", s.watershed.slow_fraction);
    r.get("tau_slow", s.watershed.tau_slow);
    r.finish();
  }
  if (const json* n = top.child("network")) {
    Reader r(*n, "network");
    r.get("nodes", s.network_nodes);
    r.get("terminals", s.terminals);
    r.get("delay_per_metre", s.pipes.delay_per_metre);
    r.get("tau_base", s.pipes.tau_base);
    r.get("tau_per_metre", s.pipes.tau_per_metre);
    r.finish();
  }
  top.get("n_nodes", s.n_nodes);
  top.get("steps", s.steps);
  top.get("seed", s.seed);
  top.get("kappa", s.kappa);
  top.get("baseflow", s.baseflow);
  top.get("diurnal", s.diurnal);
  if (const json* c = top.child("records")) {
    Reader r(*c, "records");
    r.get("drift", s.records.drift);
    r.get("origin", s.records.origin);
    r.get("radius", s.records.radius);
    r.get("p_wet_after_dry", s.record_generator.p_wet_after_dry);
    r.get("p_wet_after_wet", s.record_generator.p_wet_after_wet);
    r.get("mean_wet_total", s.record_generator.mean_wet_total);
    r.get("file", s.records_file);
    r.finish();
  }
  if (const json* c = top.child("lorenz")) {
    Reader r(*c, "lorenz");
    r.get("sigma", s.lorenz.sigma);
    r.get("rho", s.lorenz.rho);
    r.get("beta", s.lorenz.beta);
    r.get("dt", s.lorenz.dt);
    r.get("substeps", s.lorenz.substeps);
    r.get("initial", s.lorenz.initial);
    r.get("radius", s.lorenz.radius);
    r.get("mass_scale", s.lorenz.mass_scale);
    r.finish();
  }
  if (const json* c = top.child("random_field")) {
    Reader r(*c, "random_field");
    r.get("length", s.random_field.length);
    r.get("variance", s.random_field.variance);
    r.get("mean", s.random_field.mean);
    r.get("drift", s.random_field.drift);
    r.get("phase_rate", s.random_field.phase_rate);
    r.get("scale", s.random_field.scale);
    r.finish();
  }
  top.finish();
  s.validate();
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) throw ContractError("median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2) return v[mid];
  const double hi = v[mid];
  return 0.5 * (*std::max_element(v.begin(), v.begin() + mid) + hi);
}

SynthDataset build_synth(const SynthScenario& s) {
  s.validate();
  const std::uint64_t stream = splitmix(fnv1a(json(s).dump()) ^ s.seed);
  auto seed_for = [&](const char* part) { return splitmix(stream ^ fnv1a(part)); };

  const Terrain terrain = s.terrain_file.empty()
                              ? fractal_terrain(s.grid, s.cellsize, s.terrain, seed_for("terrain"))
                              : read_ascii_grid(s.terrain_file);
  const Grid grid = terrain.grid;
  const WatershedLabels labels = segment_watersheds(terrain, merge_depth_for_detail(terrain, s.detail));
  const auto info = watershed_info(terrain, labels, s.watershed);
  const PipeNetwork net =
      generate_network(terrain, s.network_nodes, s.terminals, s.pipes, seed_for("network"));

  // Each watershed feeds the nodes inside it in equal shares; one holding no
  // node drains into the node nearest its centroid.
  std::vector<std::vector<std::size_t>> feeds(labels.count);
  for (std::size_t v = 0; v < net.nodes.size(); ++v) {
    const auto r = std::min(static_cast<std::size_t>(net.nodes[v].row), grid.rows - 1);
    const auto c = std::min(static_cast<std::size_t>(net.nodes[v].col), grid.cols - 1);
    feeds[labels.label[r * grid.cols + c]].push_back(v);
  }
  for (std::size_t w = 0; w < labels.count; ++w) {
    if (!feeds[w].empty()) continue;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < net.nodes.size(); ++v) {
      const double d = std::hypot(net.nodes[v].row - info[w].centroid_row - 0.5,
                                  net.nodes[v].col - info[w].centroid_col - 0.5);
      if (d < best_d) best_d = d, best = v;
    }
    feeds[w].push_back(best);
  }

  std::unique_ptr<CloudSource> clouds;
  switch (s.source) {
    case CloudKind::Records:
      clouds = records_clouds(s.records_file.empty()
                                  ? generate_records(s.steps, s.record_generator, seed_for("records"))
                                  : load_records(s),
                              grid, s.records, s.kappa);
      break;
    case CloudKind::Lorenz: {
      // The seed nudges the initial state so seeds give distinct trajectories.
      LorenzParams p = s.lorenz;
      std::mt19937_64 rng(seed_for("lorenz"));
      std::uniform_real_distribution<double> nudge(-1.0, 1.0);
      for (double& v : p.initial) v += nudge(rng);
      clouds = lorenz_clouds(grid, p);
      break;
    }
    case CloudKind::RandomField:
      clouds = random_field_clouds(grid, s.random_field, seed_for("random-field"));
      break;
  }

  // Dry-weather flow: a per-node level with a shared daily cycle.
  std::mt19937_64 base_rng(seed_for("baseflow"));
  std::uniform_real_distribution<double> level(0.5, 1.5), jitter(-0.3, 0.3);
  std::vector<std::vector<double>> inflow(net.nodes.size(), std::vector<double>(s.steps));
  for (auto& series : inflow) {
    const double b = s.baseflow * level(base_rng), phase = jitter(base_rng);
    for (std::size_t t = 0; t < s.steps; ++t) {
      series[t] = b * (1.0 + s.diurnal * std::sin(2.0 * std::numbers::pi * t / 96.0 + phase));
    }
  }

  SynthDataset d;
  d.scenario = s;
  d.network_nodes = net.nodes.size();
  d.precipitation.assign(s.steps, 0.0);
  d.watershed_rain.assign(labels.count, std::vector<double>(s.steps));
  std::vector<double> tau;
  for (const auto& w : info) tau.push_back(w.tau);
  WatershedAccumulator acc(labels, tau);
  WatershedAccumulator slow(labels, std::vector<double>(labels.count, s.watershed.tau_slow));
  const double f_slow = s.watershed.slow_fraction;
  std::vector<double> intensity(grid.size());
  for (std::size_t t = 0; t < s.steps; ++t) {
    const CloudField& f = clouds->next();
    for (std::size_t i = 0; i < intensity.size(); ++i) intensity[i] = s.kappa * f.density[i];
    const auto& y = acc.step(intensity);
    const auto& ys = slow.step(intensity);
    for (std::size_t w = 0; w < labels.count; ++w) {
      d.watershed_rain[w][t] = acc.rain()[w];
      d.precipitation[t] += acc.rain()[w];
      const double out = (1.0 - f_slow) * y[w] + f_slow * ys[w];
      const double share = out / static_cast<double>(feeds[w].size());
      for (std::size_t v : feeds[w]) inflow[v][t] += share;
    }
  }
  for (const auto& series : inflow) {
    for (double v : series) d.total_inflow += v;
  }

  Propagation prop = propagate_network(net, inflow);
  d.absorbed = prop.absorbed;
  d.storage = prop.storage;

  std::vector<std::size_t> ids(net.nodes.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 pick(seed_for("select"));
  std::shuffle(ids.begin(), ids.end(), pick);
  ids.resize(s.n_nodes);
  std::sort(ids.begin(), ids.end());
  const std::size_t width = std::to_string(net.nodes.size() - 1).size();
  for (std::size_t id : ids) {
    std::string num = std::to_string(id);
    d.node_ids.push_back(id);
    d.node_names.push_back("node_" + std::string(width - num.size(), '0') + num);
    d.flows.push_back(std::move(prop.flow[id]));
    d.complexity.push_back(metrics::complexity(d.flows.back()).complexity);
  }
  d.median_complexity = median(d.complexity);
  return d;
}

void write_synth(const SynthDataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  constexpr std::int64_t kStart = 1704067200;  // 2024-01-01T00:00:00Z
  auto series = [&](const std::string& name, data::MetricKind kind, const std::vector<double>& v) {
    data::RawSeries r;
    r.sensor = name;
    r.kind = kind;
    r.values = v;
    r.timestamps.resize(v.size());
    for (std::size_t t = 0; t < v.size(); ++t) {
      r.timestamps[t] = kStart + static_cast<std::int64_t>(t) * data::kGridSeconds;
    }
    return r;
  };
  std::vector<data::SeriesEntry> entries;
  for (std::size_t i = 0; i < d.flows.size(); ++i) {
    const std::string file = d.node_names[i] + ".csv";
    data::write_series_csv(series(d.node_names[i], data::MetricKind::Discharge, d.flows[i]), dir / file);
    entries.push_back({file, d.node_names[i], data::MetricKind::Discharge});
  }
  data::write_series_csv(series("precipitation", data::MetricKind::Precipitation, d.precipitation),
                         dir / "precipitation.csv");
  entries.push_back({"precipitation.csv", "precipitation", data::MetricKind::Precipitation});
  data::write_dataset_index(dir, entries);

  json nodes = json::array();
  for (std::size_t i = 0; i < d.flows.size(); ++i) {
    nodes.push_back({{"name", d.node_names[i]}, {"network_id", d.node_ids[i]}, {"complexity", d.complexity[i]}});
  }
  const json manifest{{"scenario", d.scenario},
                      {"source", cloud_kind_name(d.scenario.source)},
                      {"watersheds", d.watershed_rain.size()},
                      {"network_nodes", d.network_nodes},
                      {"nodes", nodes},
                      {"median_complexity", d.median_complexity},
                      {"mass", {{"inflow", d.total_inflow}, {"absorbed", d.absorbed}, {"storage", d.storage}}}};
  std::ofstream out(dir / "synth.json");
  if (!out) throw InputError("cannot write " + (dir / "synth.json").string());
  out << manifest.dump(2) << "\n";
}

}  // namespace aquacast::cdm
