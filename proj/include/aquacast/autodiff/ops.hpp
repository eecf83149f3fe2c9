// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <random>

#include "aquacast/autodiff/graph.hpp"

namespace aquacast::ad {

// Differentiable operators. All inputs must belong to the same Graph. Shape
// mismatches throw DimensionError naming both shapes. There is no implicit
// broadcasting; add_broadcast is the single explicit exception.

/// [m,k]·[k,n] -> [m,n], or batched [g,m,k]·[g,k,n] -> [g,m,n].
Tensor matmul(const Tensor& a, const Tensor& b);
/// a·bᵀ: [m,k]·[n,k]ᵀ -> [m,n], or batched [g,m,k]·[g,n,k]ᵀ -> [g,m,n].
Tensor matmul_nt(const Tensor& a, const Tensor& b);

/// Row-vector affine map over the last axis: x[..., in]·w[in,out] + b[out].
/// Pass a default-constructed Tensor for `b` to skip the bias.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

/// Valid (unpadded) strided cross-correlation.
/// input [C_in,L] or [B,C_in,L]; kernels [C_out,C_in,k]; bias [C_out].
/// Output length is floor((L - k)/stride) + 1.
Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride);

/// Softmax over the last axis with per-row max subtraction.
Tensor softmax_rows(const Tensor& x);

/// Normalizes each last-axis row to zero mean and unit (population) variance,
/// then applies gain and shift. Requires a last axis of at least 2.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift,
                  double eps = 1e-5);

Tensor relu(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
/// x + y where y's shape equals the trailing axes of x (bias and positional
/// embedding add over leading batch/token axes).
Tensor add_broadcast(const Tensor& x, const Tensor& y);
Tensor scale(const Tensor& x, double factor);
/// Inverted dropout. Identity when p == 0 or rng is null.
Tensor dropout(const Tensor& x, double p, std::mt19937_64* rng);

/// Swaps the last two axes of a rank-2 or rank-3 tensor.
Tensor transpose_last2(const Tensor& x);
Tensor reshape(const Tensor& x, Shape shape);
/// Collapses every axis into one vector.
Tensor flatten(const Tensor& x);
/// Keeps axis 0 and collapses the rest: [B, ...] -> [B, prod(...)].
Tensor flatten_batch(const Tensor& x);
Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis);
/// Half-open range [begin, end) along `axis`.
Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end);

/// [B,N,H*dk] -> [B*H,N,dk].
Tensor split_heads(const Tensor& x, std::size_t heads);
/// [B*H,N,dk] -> [B,N,H*dk].
Tensor merge_heads(const Tensor& x, std::size_t heads);

Tensor sum(const Tensor& x);
/// Mean squared residual over all elements; scalar output.
Tensor mse_loss(const Tensor& prediction, const Tensor& target);

}  // namespace aquacast::ad
