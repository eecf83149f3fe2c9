// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace aquacast::cdm {

/// Row-major 2D grid dimensions shared by clouds and terrain.
struct Grid {
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t size() const { return rows * cols; }
  bool operator==(const Grid&) const = default;
};

enum class CloudKind { Records, Lorenz, RandomField };
std::string cloud_kind_name(CloudKind k);  // "records", "lorenz", "random-field"
CloudKind parse_cloud_kind(std::string_view s);

/// Cloud density at one step. Precipitation intensity is kappa * density.
struct CloudField {
  Grid grid;
  CloudKind kind = CloudKind::Records;
  std::array<double, 2> drift{0.0, 0.0};  // cells per step (row, col)
  std::vector<double> density;            // non-negative, grid.size()
};

/// Adds a periodic Gaussian blob of total mass `mass` centred at (row, col).
/// The discrete weights are normalized, so the grid sum grows by exactly
/// `mass` up to rounding.
void deposit_blob(CloudField& field, double row, double col, double radius, double mass);

/// A stream of cloud fields, one per time step.
class CloudSource {
 public:
  virtual ~CloudSource() = default;
  virtual const CloudField& next() = 0;
  virtual CloudKind kind() const = 0;
};

struct RecordsCloudParams {
  std::array<double, 2> drift{0.11, 0.23};
  std::array<double, 2> origin{0.0, 0.0};
  double radius = 12.0;  // blob standard deviation in cells
};

/// Method (i): one blob per step whose integrated intensity equals that step's
/// record, centred at origin + drift * t on the periodic grid. Throws
/// InputError for a negative or non-finite record.
std::unique_ptr<CloudSource> records_clouds(std::vector<double> records, Grid grid,
                                            const RecordsCloudParams& p, double kappa);

/// Seeded stand-in for a station record: hourly wet/dry Markov chain with
/// exponentially distributed wet-hour totals, expanded to the 15-minute grid
/// by zero insertion.
struct RecordGeneratorParams {
  double p_wet_after_dry = 0.04;
  double p_wet_after_wet = 0.75;
  double mean_wet_total = 1.0;
};
std::vector<double> generate_records(std::size_t steps, const RecordGeneratorParams& p,
                                     std::uint64_t seed);

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double dt = 0.005;
  std::size_t substeps = 8;  // RK4 steps per output step
  std::array<double, 3> initial{1.0, 1.0, 20.0};
  double radius = 30.0;
  double mass_scale = 0.0015;  // blob mass per unit |z|
};

/// Classical Lorenz system, integrated with fixed-step RK4.
struct LorenzState {
  std::array<double, 3> s;
  void step(const LorenzParams& p);  // one RK4 step of size p.dt
};

/// Method (ii): (x, y) of the Lorenz state place the blob on the grid and
/// |z| sets its mass. Throws ContractError if the state stops being finite.
std::unique_ptr<CloudSource> lorenz_clouds(Grid grid, const LorenzParams& p);

struct RandomFieldParams {
  double length = 8.0;       // Gaussian covariance length in cells
  double variance = 1.0;     // pre-clamp field variance
  double mean = 0.0;         // added before clamping at zero
  std::array<double, 2> drift{0.05, 0.1};
  double phase_rate = 1.0;   // maximum per-mode phase change per step (rad)
  double scale = 3e-5;       // density per unit clamped field
};

/// Method (iii): a drifting stationary Gaussian random field, clamped at 0.
std::unique_ptr<CloudSource> random_field_clouds(Grid grid, const RandomFieldParams& p,
                                                 std::uint64_t seed);

}  // namespace aquacast::cdm
