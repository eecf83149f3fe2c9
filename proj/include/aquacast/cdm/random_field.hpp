// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "aquacast/cdm/clouds.hpp"

namespace aquacast::cdm {

/// Stationary Gaussian field on a periodic grid with covariance
/// variance * exp(-r^2 / length^2), built by filtering seeded white noise in
/// the frequency domain. The spectrum is the DFT of the wrapped covariance,
/// so the periodic field has that covariance exactly.
class GaussianRandomField {
 public:
  GaussianRandomField(Grid grid, double length, double variance, std::uint64_t seed,
                      double phase_rate = 0.0);
  ~GaussianRandomField();
  GaussianRandomField(const GaussianRandomField&) = delete;
  GaussianRandomField& operator=(const GaussianRandomField&) = delete;

  /// Realization at time t: every Fourier mode is advanced by the drift
  /// (a translation) plus its own random phase rate.
  std::vector<double> sample(double t, std::array<double, 2> drift = {0.0, 0.0}) const;

  const Grid& grid() const { return grid_; }
  bool degenerate() const { return degenerate_; }  // length exceeds the grid

 private:
  Grid grid_;
  std::size_t half_cols_;
  std::vector<std::complex<double>> spectrum_;  // amplitude * noise, r2c layout
  std::vector<double> rates_;                   // per-mode phase rate, odd in k
  bool degenerate_ = false;
  void* plan_ = nullptr;
  double* real_ = nullptr;
  void* complex_ = nullptr;
};

}  // namespace aquacast::cdm
