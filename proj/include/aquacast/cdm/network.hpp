// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "aquacast/cdm/terrain.hpp"

namespace aquacast::cdm {

struct NetworkNode {
  double row = 0.0;  // grid coordinates (cells)
  double col = 0.0;
  double elevation = 0.0;
};

/// First-order lag plus pure delay: y[t] = a y[t-1] + (1 - a) g u[t - delay],
/// a = exp(-1 / tau) (a = 0 when tau = 0).
struct Pipe {
  std::size_t from = 0;
  std::size_t to = 0;
  double length = 0.0;       // metres
  double inclination = 0.0;  // radians, positive downhill
  double gain = 1.0;
  double tau = 0.0;          // steps
  std::size_t delay = 0;     // steps
};

struct PipeNetwork {
  std::vector<NetworkNode> nodes;
  std::vector<Pipe> pipes;
  std::vector<std::size_t> terminals;

  /// Kahn order over the pipes; throws NetworkError on a cycle or when a
  /// non-terminal node has no downstream path to a terminal.
  std::vector<std::size_t> topological_order() const;
};

struct PipeLaw {
  double delay_per_metre = 0.02;  // steps per metre on a flat pipe
  double tau_base = 1.0;          // steps
  double tau_per_metre = 0.005;   // steps per metre
};

/// delay = round(c * length / (1 + tan(inclination))).
std::size_t pipe_delay(double length, double inclination, const PipeLaw& law);

/// Random drainage tree over `n_nodes` positions on the terrain: nodes are
/// visited from lowest to highest, the lowest `n_terminals` become terminals
/// and every other node drains into its nearest already-visited (so lower)
/// node. The result is acyclic and every node reaches a terminal.
PipeNetwork generate_network(const Terrain& t, std::size_t n_nodes, std::size_t n_terminals,
                             const PipeLaw& law, std::uint64_t seed);

/// Response of a single pipe to an input series (same length).
std::vector<double> pipe_response(const Pipe& p, const std::vector<double>& input);

struct Propagation {
  std::vector<std::vector<double>> flow;  // per node: local inflow + pipe arrivals
  double absorbed = 0.0;                  // total outflow of terminal nodes
  double storage = 0.0;                   // water still inside pipes at the end
};

/// Routes per-node local inflows ([node][step]) through the network in
/// topological order. Terminal nodes absorb their flow.
Propagation propagate_network(const PipeNetwork& net,
                              const std::vector<std::vector<double>>& inflow);

}  // namespace aquacast::cdm
