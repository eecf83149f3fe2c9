// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "gemm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#if defined(__AVX512F__) || (defined(__AVX2__) && defined(__FMA__))
#include <immintrin.h>
#endif

namespace aquacast::ad::detail {
namespace {

inline double madd(double a, double b, double c) {
#if defined(__FMA__) || defined(__AVX512F__)
  return std::fma(a, b, c);
#else
  return a * b + c;
#endif
}

inline void store(double* c, double s, bool accumulate) { *c = accumulate ? *c + s : s; }

// Tail for rows [i0, i1) and columns [j0, j1). Element (p, j) of b sits at
// b[p * sp + j * sj]. The columns are packed so that one row of results is
// updated per k step; every element still gets its own ascending-k chain.
void tail(std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1, std::size_t n,
          std::size_t k, const double* a, const double* b, std::size_t sp, std::size_t sj,
          double* c, bool accumulate) {
  if (i0 >= i1 || j0 >= j1) return;
  const std::size_t w = j1 - j0;
  std::vector<double> packed(k * w), acc(w);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t j = 0; j < w; ++j) packed[p * w + j] = b[p * sp + (j0 + j) * sj];
  }
  for (std::size_t i = i0; i < i1; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = packed.data() + p * w;
      for (std::size_t j = 0; j < w; ++j) acc[j] = madd(av, bp[j], acc[j]);
    }
    for (std::size_t j = 0; j < w; ++j) store(c + i * n + j0 + j, acc[j], accumulate);
  }
}

#if defined(__AVX512F__)
constexpr std::size_t kMr = 8, kNr = 16;

void block(const double* a, const double* b, double* c, std::size_t ldb, std::size_t n,
           std::size_t k, bool accumulate) {
  __m512d acc[kMr][2];
  for (auto& row : acc) row[0] = row[1] = _mm512_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const __m512d b0 = _mm512_loadu_pd(b + p * ldb), b1 = _mm512_loadu_pd(b + p * ldb + 8);
    for (std::size_t r = 0; r < kMr; ++r) {
      const __m512d av = _mm512_set1_pd(a[r * k + p]);
      acc[r][0] = _mm512_fmadd_pd(av, b0, acc[r][0]);
      acc[r][1] = _mm512_fmadd_pd(av, b1, acc[r][1]);
    }
  }
  for (std::size_t r = 0; r < kMr; ++r) {
    double* cr = c + r * n;
    if (accumulate) {
      acc[r][0] = _mm512_add_pd(_mm512_loadu_pd(cr), acc[r][0]);
      acc[r][1] = _mm512_add_pd(_mm512_loadu_pd(cr + 8), acc[r][1]);
    }
    _mm512_storeu_pd(cr, acc[r][0]);
    _mm512_storeu_pd(cr + 8, acc[r][1]);
  }
}
#elif defined(__AVX2__) && defined(__FMA__)
constexpr std::size_t kMr = 6, kNr = 8;

void block(const double* a, const double* b, double* c, std::size_t ldb, std::size_t n,
           std::size_t k, bool accumulate) {
  __m256d acc[kMr][2];
  for (auto& row : acc) row[0] = row[1] = _mm256_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * ldb), b1 = _mm256_loadu_pd(b + p * ldb + 4);
    for (std::size_t r = 0; r < kMr; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * k + p);
      acc[r][0] = _mm256_fmadd_pd(av, b0, acc[r][0]);
      acc[r][1] = _mm256_fmadd_pd(av, b1, acc[r][1]);
    }
  }
  for (std::size_t r = 0; r < kMr; ++r) {
    double* cr = c + r * n;
    if (accumulate) {
      acc[r][0] = _mm256_add_pd(_mm256_loadu_pd(cr), acc[r][0]);
      acc[r][1] = _mm256_add_pd(_mm256_loadu_pd(cr + 4), acc[r][1]);
    }
    _mm256_storeu_pd(cr, acc[r][0]);
    _mm256_storeu_pd(cr + 4, acc[r][1]);
  }
}
#else
constexpr std::size_t kMr = 4, kNr = 4;

void block(const double* a, const double* b, double* c, std::size_t ldb, std::size_t n,
           std::size_t k, bool accumulate) {
  double acc[kMr][kNr] = {};
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t r = 0; r < kMr; ++r) {
      const double av = a[r * k + p];
      for (std::size_t j = 0; j < kNr; ++j) acc[r][j] = madd(av, b[p * ldb + j], acc[r][j]);
    }
  }
  for (std::size_t r = 0; r < kMr; ++r) {
    for (std::size_t j = 0; j < kNr; ++j) store(c + r * n + j, acc[r][j], accumulate);
  }
}
#endif

// a is [rows, cols] with leading dimension cols; returns its transpose.
std::vector<double> transposed(const double* a, std::size_t rows, std::size_t cols) {
  std::vector<double> t(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t[j * rows + i] = a[i * cols + j];
  }
  return t;
}

}  // namespace

void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k,
          const double* a, const double* b, double* c, double beta) {
  if (m == 0 || n == 0) return;
  const bool accumulate = beta != 0.0;
  if (k == 0) {
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    return;
  }
  std::vector<double> a_buf;
  if (trans_a) {
    a_buf = transposed(a, k, m);
    a = a_buf.data();
  }
  // b is never transposed up front: panels are packed straight from either layout.
  const std::size_t sp = trans_b ? 1 : n, sj = trans_b ? k : 1;
  const std::size_t m_main = m - m % kMr, n_main = n - n % kNr;
  // Each kNr-wide column panel of b is copied into a contiguous k x kNr
  // buffer so the kernel streams it linearly for every row block.
  std::vector<double> panel(m_main > 0 ? k * kNr : 0);
  for (std::size_t j = 0; j < n_main && m_main > 0; j += kNr) {
    if (trans_b) {
      for (std::size_t jj = 0; jj < kNr; ++jj) {
        const double* col = b + (j + jj) * k;
        for (std::size_t p = 0; p < k; ++p) panel[p * kNr + jj] = col[p];
      }
    } else {
      for (std::size_t p = 0; p < k; ++p) {
        std::copy(b + p * n + j, b + p * n + j + kNr, panel.data() + p * kNr);
      }
    }
    for (std::size_t i = 0; i < m_main; i += kMr) {
      block(a + i * k, panel.data(), c + i * n + j, kNr, n, k, accumulate);
    }
  }
  tail(0, m_main, n_main, n, n, k, a, b, sp, sj, c, accumulate);
  tail(m_main, m, 0, n, n, k, a, b, sp, sj, c, accumulate);
}

}  // namespace aquacast::ad::detail
