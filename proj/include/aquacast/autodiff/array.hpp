// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aquacast::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major array of doubles. Plain storage with no graph identity;
/// used for parameters, batches and anything that lives outside a forward pass.
struct Array {
  Shape shape;
  std::vector<double> values;

  Array() = default;
  explicit Array(Shape s, double fill = 0.0);
  Array(Shape s, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }

  bool operator==(const Array&) const = default;
};

}  // namespace aquacast::ad
