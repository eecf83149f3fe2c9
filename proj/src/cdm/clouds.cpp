// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cdm/clouds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "aquacast/cdm/random_field.hpp"
#include "aquacast/errors.hpp"

namespace aquacast::cdm {

std::string cloud_kind_name(CloudKind k) {
  switch (k) {
    case CloudKind::Records:
      return "records";
    case CloudKind::Lorenz:
      return "lorenz";
    case CloudKind::RandomField:
      return "random-field";
  }
  return "?";
}

CloudKind parse_cloud_kind(std::string_view s) {
  if (s == "records") return CloudKind::Records;
  if (s == "lorenz") return CloudKind::Lorenz;
  if (s == "random-field") return CloudKind::RandomField;
  throw ConfigError("cloud source must be records, lorenz or random-field, not '" +
                    std::string(s) + "'");
}

namespace {

// Normalized periodic Gaussian weights along one axis.
std::vector<double> axis_weights(std::size_t n, double centre, double radius) {
  std::vector<double> w(n);
  double total = 0.0;
  const double len = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::fmod(std::abs(static_cast<double>(i) - centre), len);
    d = std::min(d, len - d);
    w[i] = std::exp(-0.5 * d * d / (radius * radius));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

double wrap(double v, std::size_t n) {
  const double len = static_cast<double>(n);
  v = std::fmod(v, len);
  return v < 0.0 ? v + len : v;
}

class RecordsSource final : public CloudSource {
 public:
  RecordsSource(std::vector<double> records, Grid grid, const RecordsCloudParams& p, double kappa)
      : records_(std::move(records)), p_(p), kappa_(kappa) {
    field_.grid = grid;
    field_.kind = CloudKind::Records;
    field_.drift = p.drift;
    field_.density.assign(grid.size(), 0.0);
  }
  CloudKind kind() const override { return CloudKind::Records; }
  const CloudField& next() override {
    std::fill(field_.density.begin(), field_.density.end(), 0.0);
    const double r = t_ < records_.size() ? records_[t_] : 0.0;
    if (r > 0.0) {
      const double t = static_cast<double>(t_);
      deposit_blob(field_, p_.origin[0] + p_.drift[0] * t, p_.origin[1] + p_.drift[1] * t,
                   p_.radius, r / kappa_);
    }
    ++t_;
    return field_;
  }

 private:
  std::vector<double> records_;
  RecordsCloudParams p_;
  double kappa_;
  CloudField field_;
  std::size_t t_ = 0;
};

class LorenzSource final : public CloudSource {
 public:
  LorenzSource(Grid grid, const LorenzParams& p) : p_(p), state_{p.initial} {
    field_.grid = grid;
    field_.kind = CloudKind::Lorenz;
    field_.density.assign(grid.size(), 0.0);
  }
  CloudKind kind() const override { return CloudKind::Lorenz; }
  const CloudField& next() override {
    for (std::size_t i = 0; i < p_.substeps; ++i) state_.step(p_);
    for (double v : state_.s) {
      if (!std::isfinite(v)) {
        throw ContractError("Lorenz state became non-finite; reduce dt");
      }
    }
    std::fill(field_.density.begin(), field_.density.end(), 0.0);
    // The attractor spans roughly x in [-20, 20] and y in [-27, 27].
    const Grid& g = field_.grid;
    const double row = (state_.s[1] + 30.0) / 60.0 * static_cast<double>(g.rows);
    const double col = (state_.s[0] + 25.0) / 50.0 * static_cast<double>(g.cols);
    const double mass = p_.mass_scale * std::abs(state_.s[2]);
    if (mass > 0.0) deposit_blob(field_, row, col, p_.radius, mass);
    return field_;
  }

 private:
  LorenzParams p_;
  LorenzState state_;
  CloudField field_;
};

class RandomFieldSource final : public CloudSource {
 public:
  RandomFieldSource(Grid grid, const RandomFieldParams& p, std::uint64_t seed)
      : p_(p), field_gen_(grid, p.length, p.variance, seed, p.phase_rate) {
    field_.grid = grid;
    field_.kind = CloudKind::RandomField;
    field_.drift = p.drift;
  }
  CloudKind kind() const override { return CloudKind::RandomField; }
  const CloudField& next() override {
    field_.density = field_gen_.sample(static_cast<double>(t_++), p_.drift);
    for (double& v : field_.density) v = p_.scale * std::max(v + p_.mean, 0.0);
    return field_;
  }

 private:
  RandomFieldParams p_;
  GaussianRandomField field_gen_;
  CloudField field_;
  std::size_t t_ = 0;
};

}  // namespace

void deposit_blob(CloudField& field, double row, double col, double radius, double mass) {
  if (!(radius > 0.0)) throw ConfigError("cloud blob radius must be positive");
  const Grid& g = field.grid;
  const auto wr = axis_weights(g.rows, wrap(row, g.rows), radius);
  const auto wc = axis_weights(g.cols, wrap(col, g.cols), radius);
  for (std::size_t i = 0; i < g.rows; ++i) {
    const double mi = mass * wr[i];
    for (std::size_t j = 0; j < g.cols; ++j) field.density[i * g.cols + j] += mi * wc[j];
  }
}

std::unique_ptr<CloudSource> records_clouds(std::vector<double> records, Grid grid,
                                            const RecordsCloudParams& p, double kappa) {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!(records[i] >= 0.0) || !std::isfinite(records[i])) {
      throw InputError("precipitation record " + std::to_string(i) +
                       " is negative or not finite");
    }
  }
  return std::make_unique<RecordsSource>(std::move(records), grid, p, kappa);
}

std::vector<double> generate_records(std::size_t steps, const RecordGeneratorParams& p,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::exponential_distribution<double> amount(1.0 / p.mean_wet_total);
  std::vector<double> out(steps, 0.0);
  bool wet = false;
  for (std::size_t t = 0; t < steps; t += 4) {
    wet = u(rng) < (wet ? p.p_wet_after_wet : p.p_wet_after_dry);
    if (wet) out[t] = amount(rng);
  }
  return out;
}

void LorenzState::step(const LorenzParams& p) {
  auto f = [&](const std::array<double, 3>& v) {
    return std::array<double, 3>{p.sigma * (v[1] - v[0]), v[0] * (p.rho - v[2]) - v[1],
                                 v[0] * v[1] - p.beta * v[2]};
  };
  auto axpy = [](const std::array<double, 3>& a, double h, const std::array<double, 3>& b) {
    return std::array<double, 3>{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]};
  };
  const double h = p.dt;
  const auto k1 = f(s);
  const auto k2 = f(axpy(s, h / 2, k1));
  const auto k3 = f(axpy(s, h / 2, k2));
  const auto k4 = f(axpy(s, h, k3));
  for (std::size_t i = 0; i < 3; ++i) s[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

std::unique_ptr<CloudSource> lorenz_clouds(Grid grid, const LorenzParams& p) {
  if (!(p.dt > 0.0) || p.substeps == 0) throw ConfigError("Lorenz dt and substeps must be positive");
  return std::make_unique<LorenzSource>(grid, p);
}

std::unique_ptr<CloudSource> random_field_clouds(Grid grid, const RandomFieldParams& p,
                                                 std::uint64_t seed) {
  return std::make_unique<RandomFieldSource>(grid, p, seed);
}

}  // namespace aquacast::cdm
