// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace aquacast::ad::detail {

// C[m,n] = op(A)·op(B) + beta·C, row-major, op(A) is [m,k] and op(B) is [k,n].
// Every output element is one fused multiply-add chain over k in ascending
// order, so a row of C never depends on how many other rows are computed.
// beta must be 0 or 1.
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k,
          const double* a, const double* b, double* c, double beta);

}  // namespace aquacast::ad::detail
