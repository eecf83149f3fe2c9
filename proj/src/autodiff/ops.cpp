// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "aquacast/errors.hpp"
#include "gemm.hpp"

namespace aquacast::ad {
namespace {

using detail::gemm;

Graph& same_graph(std::string_view op, std::initializer_list<const Tensor*> ts) {
  Graph* g = nullptr;
  for (const Tensor* t : ts) {
    if (!t->valid()) continue;
    if (g == nullptr) g = t->graph();
    if (t->graph() != g) {
      throw ContractError(std::string(op) + ": operands belong to different graphs");
    }
  }
  if (g == nullptr) throw ContractError(std::string(op) + ": no valid operand");
  return *g;
}

[[noreturn]] void shape_error(std::string_view op, const Shape& a, const Shape& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                       shape_str(b));
}

void add_into(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Tensor matmul_impl(std::string_view op, const Tensor& a, const Tensor& b, bool trans_b) {
  Graph& g = same_graph(op, {&a, &b});
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != sb.size() || (sa.size() != 2 && sa.size() != 3)) shape_error(op, sa, sb);
  const bool batched = sa.size() == 3;
  const std::size_t groups = batched ? sa[0] : 1;
  if (batched && sb[0] != groups) shape_error(op, sa, sb);
  const std::size_t m = sa[sa.size() - 2];
  const std::size_t k = sa[sa.size() - 1];
  const std::size_t kb = trans_b ? sb[sb.size() - 1] : sb[sb.size() - 2];
  const std::size_t n = trans_b ? sb[sb.size() - 2] : sb[sb.size() - 1];
  if (k != kb) shape_error(op, sa, sb);

  std::vector<double> out(groups * m * n, 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  for (std::size_t q = 0; q < groups; ++q) {
    gemm(false, trans_b, m, n, k, av + q * m * k, bv + q * k * n, out.data() + q * m * n, 0.0);
  }
  Shape shape = batched ? Shape{groups, m, n} : Shape{m, n};
  const std::size_t ia = a.id(), ib = b.id();
  return g.emit(op, {ia, ib}, std::move(shape), std::move(out),
                [=](Graph& gr, std::size_t self) {
                  const double* dc = gr.grad_of(self).data();
                  const double* A = gr.value_of(ia).data();
                  const double* B = gr.value_of(ib).data();
                  for (std::size_t q = 0; q < groups; ++q) {
                    const double* dcq = dc + q * m * n;
                    if (gr.tracked(ia)) {
                      // dA = dC·op(B)ᵀ
                      gemm(false, !trans_b, m, k, n, dcq, B + q * k * n,
                           gr.grad_of(ia).data() + q * m * k, 1.0);
                    }
                    if (gr.tracked(ib)) {
                      double* dB = gr.grad_of(ib).data() + q * k * n;
                      if (trans_b) {
                        gemm(true, false, n, k, m, dcq, A + q * m * k, dB, 1.0);  // dCᵀ·A
                      } else {
                        gemm(true, false, k, n, m, A + q * m * k, dcq, dB, 1.0);  // Aᵀ·dC
                      }
                    }
                  }
                });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) { return matmul_impl("matmul", a, b, false); }

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  return matmul_impl("matmul_nt", a, b, true);
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  Graph& g = same_graph("linear", {&x, &w, &b});
  const Shape& sx = x.shape();
  const Shape& sw = w.shape();
  if (sx.empty() || sw.size() != 2 || sx.back() != sw[0]) shape_error("linear", sx, sw);
  const std::size_t in = sw[0], out_dim = sw[1];
  const std::size_t rows = numel(sx) / in;
  const bool has_bias = b.valid();
  if (has_bias && (b.shape().size() != 1 || b.shape()[0] != out_dim)) {
    shape_error("linear(bias)", sw, b.shape());
  }
  std::vector<double> out(rows * out_dim, 0.0);
  if (has_bias) {
    const double* bv = b.values().data();
    for (std::size_t r = 0; r < rows; ++r) std::copy(bv, bv + out_dim, out.data() + r * out_dim);
  }
  gemm(false, false, rows, out_dim, in, x.values().data(), w.values().data(), out.data(),
       has_bias ? 1.0 : 0.0);
  Shape shape = sx;
  shape.back() = out_dim;
  const std::size_t ix = x.id(), iw = w.id();
  const std::size_t ibias = has_bias ? b.id() : 0;
  std::vector<std::size_t> inputs{ix, iw};
  if (has_bias) inputs.push_back(ibias);
  return g.emit("linear", std::move(inputs), std::move(shape), std::move(out),
                [=](Graph& gr, std::size_t self) {
                  const double* dy = gr.grad_of(self).data();
                  if (gr.tracked(ix)) {
                    gemm(false, true, rows, in, out_dim, dy, gr.value_of(iw).data(),
                         gr.grad_of(ix).data(), 1.0);
                  }
                  if (gr.tracked(iw)) {
                    gemm(true, false, in, out_dim, rows, gr.value_of(ix).data(), dy,
                         gr.grad_of(iw).data(), 1.0);
                  }
                  if (has_bias && gr.tracked(ibias)) {
                    auto db = gr.grad_of(ibias);
                    for (std::size_t r = 0; r < rows; ++r) {
                      for (std::size_t j = 0; j < out_dim; ++j) db[j] += dy[r * out_dim + j];
                    }
                  }
                });
}

Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride) {
  Graph& g = same_graph("conv1d", {&input, &kernels, &bias});
  const Shape& si = input.shape();
  const Shape& sk = kernels.shape();
  if (stride == 0) throw DimensionError("conv1d: stride must be positive");
  if ((si.size() != 2 && si.size() != 3) || sk.size() != 3) shape_error("conv1d", si, sk);
  const bool batched = si.size() == 3;
  const std::size_t batch = batched ? si[0] : 1;
  const std::size_t cin = si[si.size() - 2];
  const std::size_t len = si[si.size() - 1];
  const std::size_t cout = sk[0], ksz = sk[2];
  if (sk[1] != cin) shape_error("conv1d", si, sk);
  if (ksz > len || ksz == 0) {
    throw DimensionError("conv1d: kernel " + shape_str(sk) + " longer than input " +
                         shape_str(si));
  }
  const bool has_bias = bias.valid();
  if (has_bias && (bias.shape().size() != 1 || bias.shape()[0] != cout)) {
    shape_error("conv1d(bias)", sk, bias.shape());
  }
  const std::size_t lout = (len - ksz) / stride + 1;
  const std::size_t rows = cin * ksz;
  const std::size_t cols = batch * lout;

  auto im2col = [=](const double* x) {
    std::vector<double> col(rows * cols);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t c = 0; c < cin; ++c) {
        const double* xc = x + (b * cin + c) * len;
        for (std::size_t j = 0; j < ksz; ++j) {
          double* dst = col.data() + (c * ksz + j) * cols + b * lout;
          for (std::size_t t = 0; t < lout; ++t) dst[t] = xc[t * stride + j];
        }
      }
    }
    return col;
  };

  const std::vector<double> col = im2col(input.values().data());
  std::vector<double> mat(cout * cols, 0.0);
  gemm(false, false, cout, cols, rows, kernels.values().data(), col.data(), mat.data(), 0.0);
  std::vector<double> out(batch * cout * lout);
  const double* bv = has_bias ? bias.values().data() : nullptr;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < cout; ++o) {
      const double off = bv ? bv[o] : 0.0;
      for (std::size_t t = 0; t < lout; ++t) {
        out[(b * cout + o) * lout + t] = mat[o * cols + b * lout + t] + off;
      }
    }
  }
  Shape shape = batched ? Shape{batch, cout, lout} : Shape{cout, lout};
  const std::size_t ii = input.id(), ik = kernels.id();
  const std::size_t ib = has_bias ? bias.id() : 0;
  std::vector<std::size_t> inputs{ii, ik};
  if (has_bias) inputs.push_back(ib);
  return g.emit(
      "conv1d", std::move(inputs), std::move(shape), std::move(out),
      [=](Graph& gr, std::size_t self) {
        const double* dy = gr.grad_of(self).data();
        std::vector<double> dmat(cout * cols);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t o = 0; o < cout; ++o) {
            for (std::size_t t = 0; t < lout; ++t) {
              dmat[o * cols + b * lout + t] = dy[(b * cout + o) * lout + t];
            }
          }
        }
        if (has_bias && gr.tracked(ib)) {
          auto db = gr.grad_of(ib);
          for (std::size_t o = 0; o < cout; ++o) {
            for (std::size_t c = 0; c < cols; ++c) db[o] += dmat[o * cols + c];
          }
        }
        if (gr.tracked(ik)) {
          const std::vector<double> col_b = im2col(gr.value_of(ii).data());
          gemm(false, true, cout, rows, cols, dmat.data(), col_b.data(), gr.grad_of(ik).data(),
               1.0);
        }
        if (gr.tracked(ii)) {
          std::vector<double> dcol(rows * cols, 0.0);
          gemm(true, false, rows, cols, cout, gr.value_of(ik).data(), dmat.data(), dcol.data(),
               0.0);
          double* dx = gr.grad_of(ii).data();
          for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t c = 0; c < cin; ++c) {
              double* dxc = dx + (b * cin + c) * len;
              for (std::size_t j = 0; j < ksz; ++j) {
                const double* src = dcol.data() + (c * ksz + j) * cols + b * lout;
                for (std::size_t t = 0; t < lout; ++t) dxc[t * stride + j] += src[t];
              }
            }
          }
        }
      });
}

Tensor softmax_rows(const Tensor& x) {
  Graph& g = same_graph("softmax_rows", {&x});
  const Shape& s = x.shape();
  if (s.empty() || s.back() == 0) throw DimensionError("softmax_rows: empty last axis");
  const std::size_t n = s.back();
  const std::size_t rows = numel(s) / n;
  const double* xv = x.values().data();
  std::vector<double> out(rows * n);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = xv + r * n;
    double* yr = out.data() + r * n;
    const double mx = *std::max_element(xr, xr + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      yr[j] = std::exp(xr[j] - mx);
      total += yr[j];
    }
    for (std::size_t j = 0; j < n; ++j) yr[j] /= total;
  }
  const std::size_t ix = x.id();
  return g.emit("softmax_rows", {ix}, s, std::move(out), [=](Graph& gr, std::size_t self) {
    if (!gr.tracked(ix)) return;
    const double* y = gr.value_of(self).data();
    const double* dy = gr.grad_of(self).data();
    double* dx = gr.grad_of(ix).data();
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += dy[r * n + j] * y[r * n + j];
      for (std::size_t j = 0; j < n; ++j) dx[r * n + j] += y[r * n + j] * (dy[r * n + j] - dot);
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps) {
  Graph& g = same_graph("layer_norm", {&x, &gain, &shift});
  const Shape& s = x.shape();
  if (s.empty() || s.back() < 2) {
    throw DimensionError("layer_norm: degenerate normalization over last axis of " +
                         shape_str(s) + " (need at least 2 features)");
  }
  const std::size_t d = s.back();
  if (gain.shape() != Shape{d}) shape_error("layer_norm(gain)", s, gain.shape());
  if (shift.shape() != Shape{d}) shape_error("layer_norm(shift)", s, shift.shape());
  const std::size_t rows = numel(s) / d;
  const double* xv = x.values().data();
  const double* gv = gain.values().data();
  const double* bv = shift.values().data();
  auto xhat = std::make_shared<std::vector<double>>(rows * d);
  auto inv_sigma = std::make_shared<std::vector<double>>(rows);
  std::vector<double> out(rows * d);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = xv + r * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xr[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    (*inv_sigma)[r] = inv;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (xr[j] - mean) * inv;
      (*xhat)[r * d + j] = h;
      out[r * d + j] = h * gv[j] + bv[j];
    }
  }
  const std::size_t ix = x.id(), ig = gain.id(), is = shift.id();
  return g.emit("layer_norm", {ix, ig, is}, s, std::move(out),
                [=](Graph& gr, std::size_t self) {
                  const double* dy = gr.grad_of(self).data();
                  const double* gv2 = gr.value_of(ig).data();
                  const auto& h = *xhat;
                  if (gr.tracked(ig)) {
                    auto dg = gr.grad_of(ig);
                    for (std::size_t r = 0; r < rows; ++r) {
                      for (std::size_t j = 0; j < d; ++j) dg[j] += dy[r * d + j] * h[r * d + j];
                    }
                  }
                  if (gr.tracked(is)) {
                    auto ds = gr.grad_of(is);
                    for (std::size_t r = 0; r < rows; ++r) {
                      for (std::size_t j = 0; j < d; ++j) ds[j] += dy[r * d + j];
                    }
                  }
                  if (gr.tracked(ix)) {
                    double* dx = gr.grad_of(ix).data();
                    const double inv_d = 1.0 / static_cast<double>(d);
                    for (std::size_t r = 0; r < rows; ++r) {
                      double mean_dh = 0.0, mean_dh_h = 0.0;
                      for (std::size_t j = 0; j < d; ++j) {
                        const double dh = dy[r * d + j] * gv2[j];
                        mean_dh += dh;
                        mean_dh_h += dh * h[r * d + j];
                      }
                      mean_dh *= inv_d;
                      mean_dh_h *= inv_d;
                      const double inv = (*inv_sigma)[r];
                      for (std::size_t j = 0; j < d; ++j) {
                        const double dh = dy[r * d + j] * gv2[j];
                        dx[r * d + j] += inv * (dh - mean_dh - h[r * d + j] * mean_dh_h);
                      }
                    }
                  }
                });
}

Tensor relu(const Tensor& x) {
  Graph& g = same_graph("relu", {&x});
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  const std::size_t ix = x.id();
  return g.emit("relu", {ix}, x.shape(), std::move(out), [=](Graph& gr, std::size_t self) {
    if (!gr.tracked(ix)) return;
    auto dy = gr.grad_of(self);
    auto xs = gr.value_of(ix);
    auto dx = gr.grad_of(ix);
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (xs[i] > 0.0) dx[i] += dy[i];
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  Graph& g = same_graph("add", {&a, &b});
  if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return g.emit("add", {ia, ib}, a.shape(), std::move(out), [=](Graph& gr, std::size_t self) {
    auto dy = gr.grad_of(self);
    if (gr.tracked(ia)) add_into(gr.grad_of(ia), dy);
    if (gr.tracked(ib)) add_into(gr.grad_of(ib), dy);
  });
}

Tensor add_broadcast(const Tensor& x, const Tensor& y) {
  Graph& g = same_graph("add_broadcast", {&x, &y});
  const Shape& sx = x.shape();
  const Shape& sy = y.shape();
  if (sy.size() > sx.size() || !std::equal(sy.rbegin(), sy.rend(), sx.rbegin())) {
    shape_error("add_broadcast", sx, sy);
  }
  const std::size_t inner = numel(sy);
  const std::size_t outer = inner == 0 ? 0 : numel(sx) / inner;
  auto xv = x.values();
  auto yv = y.values();
  std::vector<double> out(xv.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) out[o * inner + i] = xv[o * inner + i] + yv[i];
  }
  const std::size_t ix = x.id(), iy = y.id();
  return g.emit("add_broadcast", {ix, iy}, sx, std::move(out),
                [=](Graph& gr, std::size_t self) {
                  auto dz = gr.grad_of(self);
                  if (gr.tracked(ix)) add_into(gr.grad_of(ix), dz);
                  if (gr.tracked(iy)) {
                    auto dy = gr.grad_of(iy);
                    for (std::size_t o = 0; o < outer; ++o) {
                      for (std::size_t i = 0; i < inner; ++i) dy[i] += dz[o * inner + i];
                    }
                  }
                });
}

Tensor scale(const Tensor& x, double factor) {
  Graph& g = same_graph("scale", {&x});
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * factor;
  const std::size_t ix = x.id();
  return g.emit("scale", {ix}, x.shape(), std::move(out), [=](Graph& gr, std::size_t self) {
    if (!gr.tracked(ix)) return;
    auto dy = gr.grad_of(self);
    auto dx = gr.grad_of(ix);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * factor;
  });
}

Tensor dropout(const Tensor& x, double p, std::mt19937_64* rng) {
  if (p <= 0.0 || rng == nullptr) return x;
  if (p >= 1.0) throw ConfigError("dropout rate must be below 1");
  Graph& g = same_graph("dropout", {&x});
  auto xv = x.values();
  auto mask = std::make_shared<std::vector<double>>(xv.size());
  std::bernoulli_distribution keep(1.0 - p);
  const double kept = 1.0 / (1.0 - p);
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    (*mask)[i] = keep(*rng) ? kept : 0.0;
    out[i] = xv[i] * (*mask)[i];
  }
  const std::size_t ix = x.id();
  return g.emit("dropout", {ix}, x.shape(), std::move(out), [=](Graph& gr, std::size_t self) {
    if (!gr.tracked(ix)) return;
    auto dy = gr.grad_of(self);
    auto dx = gr.grad_of(ix);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * (*mask)[i];
  });
}

Tensor transpose_last2(const Tensor& x) {
  Graph& g = same_graph("transpose_last2", {&x});
  const Shape& s = x.shape();
  if (s.size() != 2 && s.size() != 3) {
    throw DimensionError("transpose_last2: rank-2 or rank-3 tensor expected, got " +
                         shape_str(s));
  }
  const std::size_t groups = s.size() == 3 ? s[0] : 1;
  const std::size_t r = s[s.size() - 2], c = s[s.size() - 1];
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t q = 0; q < groups; ++q) {
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) out[q * r * c + j * r + i] = xv[q * r * c + i * c + j];
    }
  }
  Shape shape = s;
  std::swap(shape[shape.size() - 1], shape[shape.size() - 2]);
  const std::size_t ix = x.id();
  return g.emit("transpose_last2", {ix}, std::move(shape), std::move(out),
                [=](Graph& gr, std::size_t self) {
                  if (!gr.tracked(ix)) return;
                  auto dy = gr.grad_of(self);
                  auto dx = gr.grad_of(ix);
                  for (std::size_t q = 0; q < groups; ++q) {
                    for (std::size_t i = 0; i < r; ++i) {
                      for (std::size_t j = 0; j < c; ++j) {
                        dx[q * r * c + i * c + j] += dy[q * r * c + j * r + i];
                      }
                    }
                  }
                });
}

Tensor reshape(const Tensor& x, Shape shape) {
  Graph& g = same_graph("reshape", {&x});
  if (numel(shape) != numel(x.shape())) shape_error("reshape", x.shape(), shape);
  auto xv = x.values();
  std::vector<double> out(xv.begin(), xv.end());
  const std::size_t ix = x.id();
  return g.emit("reshape", {ix}, std::move(shape), std::move(out),
                [=](Graph& gr, std::size_t self) {
                  if (gr.tracked(ix)) add_into(gr.grad_of(ix), gr.grad_of(self));
                });
}

Tensor flatten(const Tensor& x) { return reshape(x, {numel(x.shape())}); }

Tensor flatten_batch(const Tensor& x) {
  const Shape& s = x.shape();
  if (s.empty()) throw DimensionError("flatten_batch: scalar input");
  return reshape(x, {s[0], s[0] == 0 ? 0 : numel(s) / s[0]});
}

Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis) {
  Graph& g = same_graph("concat", {&a, &b});
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != sb.size() || axis >= sa.size()) shape_error("concat", sa, sb);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (i != axis && sa[i] != sb[i]) shape_error("concat", sa, sb);
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= sa[i];
  for (std::size_t i = axis + 1; i < sa.size(); ++i) inner *= sa[i];
  const std::size_t ca = sa[axis] * inner, cb = sb[axis] * inner;
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(outer * (ca + cb));
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(av.data() + o * ca, ca, out.data() + o * (ca + cb));
    std::copy_n(bv.data() + o * cb, cb, out.data() + o * (ca + cb) + ca);
  }
  Shape shape = sa;
  shape[axis] += sb[axis];
  const std::size_t ia = a.id(), ib = b.id();
  return g.emit("concat", {ia, ib}, std::move(shape), std::move(out),
                [=](Graph& gr, std::size_t self) {
                  auto dy = gr.grad_of(self);
                  for (std::size_t o = 0; o < outer; ++o) {
                    const double* src = dy.data() + o * (ca + cb);
                    if (gr.tracked(ia)) {
                      double* da = gr.grad_of(ia).data() + o * ca;
                      for (std::size_t i = 0; i < ca; ++i) da[i] += src[i];
                    }
                    if (gr.tracked(ib)) {
                      double* db = gr.grad_of(ib).data() + o * cb;
                      for (std::size_t i = 0; i < cb; ++i) db[i] += src[ca + i];
                    }
                  }
                });
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end) {
  Graph& g = same_graph("slice", {&x});
  const Shape& s = x.shape();
  if (axis >= s.size() || begin > end || end > s[axis]) {
    throw DimensionError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") on axis " + std::to_string(axis) + " of " + shape_str(s));
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t full = s[axis] * inner;
  const std::size_t part = (end - begin) * inner;
  const std::size_t offset = begin * inner;
  auto xv = x.values();
  std::vector<double> out(outer * part);
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(xv.data() + o * full + offset, part, out.data() + o * part);
  }
  Shape shape = s;
  shape[axis] = end - begin;
  const std::size_t ix = x.id();
  return g.emit("slice", {ix}, std::move(shape), std::move(out),
                [=](Graph& gr, std::size_t self) {
                  if (!gr.tracked(ix)) return;
                  auto dy = gr.grad_of(self);
                  auto dx = gr.grad_of(ix);
                  for (std::size_t o = 0; o < outer; ++o) {
                    for (std::size_t i = 0; i < part; ++i) {
                      dx[o * full + offset + i] += dy[o * part + i];
                    }
                  }
                });
}

Tensor split_heads(const Tensor& x, std::size_t heads) {
  Graph& g = same_graph("split_heads", {&x});
  const Shape& s = x.shape();
  if (s.size() != 3 || heads == 0 || s[2] % heads != 0) {
    throw DimensionError("split_heads: cannot split " + shape_str(s) + " into " +
                         std::to_string(heads) + " heads");
  }
  const std::size_t batch = s[0], n = s[1], d = s[2], dk = d / heads;
  auto xv = x.values();
  std::vector<double> out(xv.size());
  // out[b*H + h, t, j] = x[b, t, h*dk + j]
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t t = 0; t < n; ++t) {
        std::copy_n(xv.data() + (b * n + t) * d + h * dk, dk,
                    out.data() + ((b * heads + h) * n + t) * dk);
      }
    }
  }
  const std::size_t ix = x.id();
  return g.emit("split_heads", {ix}, {batch * heads, n, dk}, std::move(out),
                [=](Graph& gr, std::size_t self) {
                  if (!gr.tracked(ix)) return;
                  auto dy = gr.grad_of(self);
                  auto dx = gr.grad_of(ix);
                  for (std::size_t b = 0; b < batch; ++b) {
                    for (std::size_t h = 0; h < heads; ++h) {
                      for (std::size_t t = 0; t < n; ++t) {
                        const double* src = dy.data() + ((b * heads + h) * n + t) * dk;
                        double* dst = dx.data() + (b * n + t) * d + h * dk;
                        for (std::size_t j = 0; j < dk; ++j) dst[j] += src[j];
                      }
                    }
                  }
                });
}

Tensor merge_heads(const Tensor& x, std::size_t heads) {
  Graph& g = same_graph("merge_heads", {&x});
  const Shape& s = x.shape();
  if (s.size() != 3 || heads == 0 || s[0] % heads != 0) {
    throw DimensionError("merge_heads: cannot merge " + shape_str(s) + " from " +
                         std::to_string(heads) + " heads");
  }
  const std::size_t batch = s[0] / heads, n = s[1], dk = s[2], d = dk * heads;
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t t = 0; t < n; ++t) {
        std::copy_n(xv.data() + ((b * heads + h) * n + t) * dk, dk,
                    out.data() + (b * n + t) * d + h * dk);
      }
    }
  }
  const std::size_t ix = x.id();
  return g.emit("merge_heads", {ix}, {batch, n, d}, std::move(out),
                [=](Graph& gr, std::size_t self) {
                  if (!gr.tracked(ix)) return;
                  auto dy = gr.grad_of(self);
                  auto dx = gr.grad_of(ix);
                  for (std::size_t b = 0; b < batch; ++b) {
                    for (std::size_t h = 0; h < heads; ++h) {
                      for (std::size_t t = 0; t < n; ++t) {
                        const double* src = dy.data() + (b * n + t) * d + h * dk;
                        double* dst = dx.data() + ((b * heads + h) * n + t) * dk;
                        for (std::size_t j = 0; j < dk; ++j) dst[j] += src[j];
                      }
                    }
                  }
                });
}

Tensor sum(const Tensor& x) {
  Graph& g = same_graph("sum", {&x});
  double total = 0.0;
  for (double v : x.values()) total += v;
  const std::size_t ix = x.id();
  return g.emit("sum", {ix}, {1}, {total}, [=](Graph& gr, std::size_t self) {
    if (!gr.tracked(ix)) return;
    const double dy = gr.grad_of(self)[0];
    for (double& d : gr.grad_of(ix)) d += dy;
  });
}

Tensor mse_loss(const Tensor& prediction, const Tensor& target) {
  Graph& g = same_graph("mse_loss", {&prediction, &target});
  if (prediction.shape() != target.shape()) {
    shape_error("mse_loss", prediction.shape(), target.shape());
  }
  auto pv = prediction.values();
  auto tv = target.values();
  if (pv.empty()) throw DimensionError("mse_loss: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) total += (pv[i] - tv[i]) * (pv[i] - tv[i]);
  const double n = static_cast<double>(pv.size());
  const std::size_t ip = prediction.id(), it = target.id();
  return g.emit("mse_loss", {ip, it}, {1}, {total / n}, [=](Graph& gr, std::size_t self) {
    const double dy = gr.grad_of(self)[0];
    auto p = gr.value_of(ip);
    auto t = gr.value_of(it);
    const double c = 2.0 * dy / n;
    if (gr.tracked(ip)) {
      auto dp = gr.grad_of(ip);
      for (std::size_t i = 0; i < dp.size(); ++i) dp[i] += c * (p[i] - t[i]);
    }
    if (gr.tracked(it)) {
      auto dt = gr.grad_of(it);
      for (std::size_t i = 0; i < dt.size(); ++i) dt[i] -= c * (p[i] - t[i]);
    }
  });
}

}  // namespace aquacast::ad
