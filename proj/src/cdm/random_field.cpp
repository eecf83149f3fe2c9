// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cdm/random_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "aquacast/errors.hpp"

namespace aquacast::cdm {
namespace {

long signed_freq(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

// r2c transform of a real grid; returns rows x (cols/2+1) coefficients.
std::vector<std::complex<double>> forward(const Grid& g, std::vector<double> in) {
  const std::size_t hc = g.cols / 2 + 1;
  std::vector<std::complex<double>> out(g.rows * hc);
  fftw_plan plan = fftw_plan_dft_r2c_2d(static_cast<int>(g.rows), static_cast<int>(g.cols),
                                        in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                        FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

}  // namespace

GaussianRandomField::GaussianRandomField(Grid grid, double length, double variance,
                                         std::uint64_t seed, double phase_rate)
    : grid_(grid), half_cols_(grid.cols / 2 + 1) {
  if (grid.rows < 2 || grid.cols < 2) throw ConfigError("random field grid must be at least 2x2");
  if (!(length > 0.0)) throw ConfigError("random field correlation length must be positive");
  if (variance < 0.0) throw ConfigError("random field variance must be non-negative");
  degenerate_ = length > static_cast<double>(std::min(grid.rows, grid.cols));

  std::vector<double> cov(grid.size());
  for (std::size_t i = 0; i < grid.rows; ++i) {
    const double di = static_cast<double>(std::min(i, grid.rows - i));
    for (std::size_t j = 0; j < grid.cols; ++j) {
      const double dj = static_cast<double>(std::min(j, grid.cols - j));
      cov[i * grid.cols + j] = variance * std::exp(-(di * di + dj * dj) / (length * length));
    }
  }
  const auto spectral = forward(grid, std::move(cov));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(grid.size());
  for (double& v : noise) v = normal(rng);
  const auto white = forward(grid, std::move(noise));

  spectrum_.resize(spectral.size());
  for (std::size_t k = 0; k < spectral.size(); ++k) {
    // Wrapped Gaussian kernels are positive definite up to rounding.
    spectrum_[k] = std::sqrt(std::max(spectral[k].real(), 0.0)) * white[k];
  }

  std::uniform_real_distribution<double> rate(-phase_rate, phase_rate);
  rates_.resize(spectrum_.size());
  for (double& r : rates_) r = rate(rng);
  // Columns 0 and cols/2 hold both k and -k; keep their rates odd so the
  // evolved spectrum stays Hermitian.
  for (std::size_t kc : {std::size_t{0}, grid.cols % 2 == 0 ? grid.cols / 2 : std::size_t{0}}) {
    for (std::size_t kr = 0; kr < grid.rows; ++kr) {
      const std::size_t partner = (grid.rows - kr) % grid.rows;
      if (partner == kr) {
        rates_[kr * half_cols_ + kc] = 0.0;
      } else if (partner < kr) {
        rates_[kr * half_cols_ + kc] = -rates_[partner * half_cols_ + kc];
      }
    }
  }

  real_ = fftw_alloc_real(grid.size());
  complex_ = fftw_alloc_complex(spectrum_.size());
  plan_ = fftw_plan_dft_c2r_2d(static_cast<int>(grid.rows), static_cast<int>(grid.cols),
                               static_cast<fftw_complex*>(complex_), real_, FFTW_ESTIMATE);
}

GaussianRandomField::~GaussianRandomField() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(real_);
  fftw_free(complex_);
}

std::vector<double> GaussianRandomField::sample(double t, std::array<double, 2> drift) const {
  auto* buf = static_cast<std::complex<double>*>(complex_);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t kr = 0; kr < grid_.rows; ++kr) {
    // Nyquist frequencies carry no translation phase (their sign is ambiguous).
    const long fr = grid_.rows % 2 == 0 && kr == grid_.rows / 2 ? 0 : signed_freq(kr, grid_.rows);
    for (std::size_t kc = 0; kc < half_cols_; ++kc) {
      const long fc = grid_.cols % 2 == 0 && kc == grid_.cols / 2 ? 0 : static_cast<long>(kc);
      const std::size_t k = kr * half_cols_ + kc;
      const double theta =
          rates_[k] * t - two_pi * t *
                              (static_cast<double>(fr) * drift[0] / static_cast<double>(grid_.rows) +
                               static_cast<double>(fc) * drift[1] / static_cast<double>(grid_.cols));
      buf[k] = spectrum_[k] * std::polar(1.0, theta);
    }
  }
  fftw_execute(static_cast<fftw_plan>(plan_));
  const double n = static_cast<double>(grid_.size());
  std::vector<double> out(real_, real_ + grid_.size());
  for (double& v : out) v /= n;
  return out;
}

}  // namespace aquacast::cdm
