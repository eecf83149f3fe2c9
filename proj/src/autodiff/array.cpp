// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/autodiff/array.hpp"

#include <functional>
#include <numeric>

#include "aquacast/errors.hpp"

namespace aquacast::ad {

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Array::Array(Shape s, double fill) : shape(std::move(s)), values(numel(shape), fill) {}

Array::Array(Shape s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
  if (numel(shape) != values.size()) {
    throw DimensionError("array of shape " + shape_str(shape) + " given " +
                         std::to_string(values.size()) + " values");
  }
}

}  // namespace aquacast::ad
