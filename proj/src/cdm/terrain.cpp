// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cdm/terrain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "aquacast/errors.hpp"

namespace aquacast::cdm {

double Terrain::sample(double row, double col) const {
  row = std::clamp(row, 0.0, static_cast<double>(grid.rows - 1));
  col = std::clamp(col, 0.0, static_cast<double>(grid.cols - 1));
  const std::size_t r0 = std::min(static_cast<std::size_t>(row), grid.rows - 1);
  const std::size_t c0 = std::min(static_cast<std::size_t>(col), grid.cols - 1);
  const std::size_t r1 = std::min(r0 + 1, grid.rows - 1), c1 = std::min(c0 + 1, grid.cols - 1);
  const double fr = row - static_cast<double>(r0), fc = col - static_cast<double>(c0);
  return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c1)) +
         fr * ((1 - fc) * at(r1, c0) + fc * at(r1, c1));
}

Terrain fractal_terrain(Grid grid, double cellsize, const FractalParams& p, std::uint64_t seed) {
  if (grid.rows == 0 || grid.cols == 0) throw ConfigError("terrain grid must be non-empty");
  if (!(p.roughness > 0.0 && p.roughness < 1.0)) throw ConfigError("roughness must lie in (0, 1)");
  std::size_t n = 1;
  while (n + 1 < std::max(grid.rows, grid.cols)) n *= 2;
  const std::size_t size = n + 1;
  std::vector<double> h(size * size, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return h[r * size + c]; };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double scale = p.amplitude;
  for (std::size_t r : {std::size_t{0}, n}) {
    for (std::size_t c : {std::size_t{0}, n}) at(r, c) = scale * u(rng);
  }
  for (std::size_t step = n; step > 1; step /= 2) {
    const std::size_t half = step / 2;
    for (std::size_t r = half; r < size; r += step) {  // diamond
      for (std::size_t c = half; c < size; c += step) {
        const double mean =
            (at(r - half, c - half) + at(r - half, c + half) + at(r + half, c - half) +
             at(r + half, c + half)) / 4.0;
        at(r, c) = mean + scale * u(rng);
      }
    }
    for (std::size_t r = 0; r < size; r += half) {  // square
      for (std::size_t c = (r / half) % 2 == 0 ? half : 0; c < size; c += step) {
        double sum = 0.0;
        int k = 0;
        if (r >= half) sum += at(r - half, c), ++k;
        if (r + half < size) sum += at(r + half, c), ++k;
        if (c >= half) sum += at(r, c - half), ++k;
        if (c + half < size) sum += at(r, c + half), ++k;
        at(r, c) = sum / k + scale * u(rng);
      }
    }
    scale *= p.roughness;
  }

  Terrain t;
  t.grid = grid;
  t.cellsize = cellsize;
  t.elevation.resize(grid.size());
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) t.elevation[r * grid.cols + c] = p.base + at(r, c);
  }
  return t;
}

Terrain read_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open terrain grid " + path.string());
  Terrain t;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw InputError(path.string() + ": line " + std::to_string(line_no) + ": " + what);
  };
  auto header = [&](const char* key) {
    if (!std::getline(in, line)) fail(std::string("missing '") + key + "' header");
    ++line_no;
    std::istringstream ss(line);
    std::string name;
    double value = 0.0;
    if (!(ss >> name >> value) || name != key) fail(std::string("expected '") + key + " <value>'");
    return value;
  };
  const double ncols = header("ncols"), nrows = header("nrows");
  t.cellsize = header("cellsize");
  if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows)) {
    fail("ncols and nrows must be positive integers");
  }
  if (!(t.cellsize > 0.0)) fail("cellsize must be positive");
  t.grid = {static_cast<std::size_t>(nrows), static_cast<std::size_t>(ncols)};
  t.elevation.reserve(t.grid.size());
  for (std::size_t r = 0; r < t.grid.rows; ++r) {
    if (!std::getline(in, line)) fail("expected " + std::to_string(t.grid.rows) + " rows of elevations");
    ++line_no;
    std::istringstream ss(line);
    std::string tok;
    std::size_t count = 0;
    while (ss >> tok) {
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        fail("bad elevation '" + tok + "'");
      }
      t.elevation.push_back(v);
      ++count;
    }
    if (count != t.grid.cols) {
      fail("expected " + std::to_string(t.grid.cols) + " elevations, found " + std::to_string(count));
    }
  }
  return t;
}

void write_ascii_grid(const std::filesystem::path& path, const Terrain& t) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write terrain grid " + path.string());
  out << "ncols " << t.grid.cols << "\nnrows " << t.grid.rows << "\ncellsize " << t.cellsize << "\n";
  char buf[32];
  for (std::size_t r = 0; r < t.grid.rows; ++r) {
    for (std::size_t c = 0; c < t.grid.cols; ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, t.at(r, c));
      if (c) out << ' ';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

}  // namespace aquacast::cdm
