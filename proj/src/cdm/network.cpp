// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cdm/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "aquacast/errors.hpp"

namespace aquacast::cdm {

std::vector<std::size_t> PipeNetwork::topological_order() const {
  const std::size_t n = nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const Pipe& p : pipes) {
    if (p.from >= n || p.to >= n) throw NetworkError("pipe references a missing node");
    if (p.from == p.to) throw NetworkError("pipe from node " + std::to_string(p.from) + " to itself");
    ++indegree[p.to];
    out[p.from].push_back(p.to);
  }
  std::vector<std::size_t> order, ready;
  for (std::size_t v = n; v-- > 0;) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (std::size_t w : out[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (order.size() != n) throw NetworkError("pipe network contains a cycle");

  std::vector<bool> drains(n, false);
  for (std::size_t t : terminals) {
    if (t >= n) throw NetworkError("terminal references a missing node");
    if (!out[t].empty()) throw NetworkError("terminal node " + std::to_string(t) + " has an outgoing pipe");
    drains[t] = true;
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (std::size_t w : out[*it]) drains[*it] = drains[*it] || drains[w];
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!drains[v]) {
      throw NetworkError("node " + std::to_string(v) + " has no downstream path to a terminal");
    }
  }
  return order;
}

std::size_t pipe_delay(double length, double inclination, const PipeLaw& law) {
  return static_cast<std::size_t>(
      std::llround(law.delay_per_metre * length / (1.0 + std::tan(inclination))));
}

PipeNetwork generate_network(const Terrain& t, std::size_t n_nodes, std::size_t n_terminals,
                             const PipeLaw& law, std::uint64_t seed) {
  if (n_nodes == 0) throw ConfigError("network needs at least one node");
  if (n_terminals == 0 || n_terminals > n_nodes) {
    throw ConfigError("terminal count must lie in [1, node count]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(0.0, static_cast<double>(t.grid.rows));
  std::uniform_real_distribution<double> uc(0.0, static_cast<double>(t.grid.cols));
  std::vector<NetworkNode> raw(n_nodes);
  for (NetworkNode& v : raw) {
    v.row = ur(rng);
    v.col = uc(rng);
    v.elevation = t.sample(v.row - 0.5, v.col - 0.5);
  }
  std::vector<std::size_t> by_height(n_nodes);
  std::iota(by_height.begin(), by_height.end(), 0);
  std::stable_sort(by_height.begin(), by_height.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a].elevation < raw[b].elevation; });

  PipeNetwork net;
  for (std::size_t i : by_height) net.nodes.push_back(raw[i]);  // node ids ascend with height
  for (std::size_t v = 0; v < n_terminals; ++v) net.terminals.push_back(v);
  for (std::size_t v = n_terminals; v < n_nodes; ++v) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < v; ++w) {
      const double d = std::hypot(net.nodes[v].row - net.nodes[w].row, net.nodes[v].col - net.nodes[w].col);
      if (d < best_d) best_d = d, best = w;
    }
    Pipe p;
    p.from = v;
    p.to = best;
    p.length = std::max(best_d, 1e-3) * t.cellsize;
    p.inclination = std::atan((net.nodes[v].elevation - net.nodes[best].elevation) / p.length);
    p.tau = law.tau_base + law.tau_per_metre * p.length;
    p.delay = pipe_delay(p.length, p.inclination, law);
    net.pipes.push_back(p);
  }
  return net;
}

std::vector<double> pipe_response(const Pipe& p, const std::vector<double>& input) {
  const double a = p.tau > 0.0 ? std::exp(-1.0 / p.tau) : 0.0;
  std::vector<double> y(input.size(), 0.0);
  double prev = 0.0;
  for (std::size_t t = 0; t < input.size(); ++t) {
    const double u = t >= p.delay ? input[t - p.delay] : 0.0;
    prev = a * prev + (1.0 - a) * p.gain * u;
    y[t] = prev;
  }
  return y;
}

Propagation propagate_network(const PipeNetwork& net,
                              const std::vector<std::vector<double>>& inflow) {
  const std::size_t n = net.nodes.size();
  if (inflow.size() != n) throw DimensionError("one inflow series per network node required");
  const std::size_t steps = n ? inflow.front().size() : 0;
  for (const auto& s : inflow) {
    if (s.size() != steps) throw DimensionError("inflow series differ in length");
  }
  const auto order = net.topological_order();
  std::vector<std::vector<std::size_t>> incoming(n), outgoing(n);
  for (std::size_t i = 0; i < net.pipes.size(); ++i) {
    incoming[net.pipes[i].to].push_back(i);
    outgoing[net.pipes[i].from].push_back(i);
  }

  Propagation out;
  out.flow = inflow;
  std::vector<std::vector<double>> arrivals(net.pipes.size());
  for (std::size_t v : order) {
    auto& f = out.flow[v];
    for (std::size_t pi : incoming[v]) {
      for (std::size_t t = 0; t < steps; ++t) f[t] += arrivals[pi][t];
      arrivals[pi] = {};
    }
    for (std::size_t pi : outgoing[v]) {
      const Pipe& p = net.pipes[pi];
      arrivals[pi] = pipe_response(p, f);
      // Input still in the delay line plus the filter's stored water.
      const double a = p.tau > 0.0 ? std::exp(-1.0 / p.tau) : 0.0;
      for (std::size_t t = steps > p.delay ? steps - p.delay : 0; t < steps; ++t) {
        out.storage += p.gain * f[t];
      }
      if (steps > 0) out.storage += a / (1.0 - a) * arrivals[pi].back();
    }
  }
  for (std::size_t v : net.terminals) {
    out.absorbed += std::accumulate(out.flow[v].begin(), out.flow[v].end(), 0.0);
  }
  return out;
}

}  // namespace aquacast::cdm
