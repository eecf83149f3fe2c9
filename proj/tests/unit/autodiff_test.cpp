// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/gradcheck.hpp"
#include "aquacast/autodiff/ops.hpp"
#include "aquacast/errors.hpp"

using namespace aquacast;
using ad::Array;
using ad::Graph;
using ad::Tensor;
using check::gradcheck;
using check::random_array;

namespace {

constexpr double kOpTol = 1e-4;

// Projects a tensor onto a fixed random direction so every output element
// contributes to the scalar loss with a distinct weight.
Tensor project(Graph& g, const Tensor& y, std::uint64_t seed = 99) {
  std::mt19937_64 rng(seed);
  const std::size_t n = ad::numel(y.shape());
  Tensor w = g.constant(random_array({n, 1}, rng));
  return ad::reshape(ad::matmul(ad::reshape(y, {1, n}), w), {1});
}

std::vector<double> vals(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

TEST(Matmul, IdentityLeavesOperandUnchanged) {
  Graph g;
  Tensor i = g.constant(Array({2, 2}, {1, 0, 0, 1}));
  Tensor b = g.constant(Array({2, 2}, {3, 4, 5, 6}));
  EXPECT_EQ(vals(ad::matmul(i, b)), (std::vector<double>{3, 4, 5, 6}));
}

TEST(Matmul, RowTimesColumn) {
  Graph g;
  Tensor a = g.constant(Array({1, 2}, {1, 2}));
  Tensor b = g.constant(Array({2, 1}, {3, 4}));
  Tensor c = ad::matmul(a, b);
  EXPECT_EQ(c.shape(), (ad::Shape{1, 1}));
  EXPECT_DOUBLE_EQ(c.values()[0], 11.0);
}

TEST(Matmul, MismatchNamesBothShapes) {
  Graph g;
  Tensor a = g.constant(Array({2, 3}, 1.0));
  Tensor b = g.constant(Array({2, 3}, 1.0));
  try {
    ad::matmul(a, b);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("and [2x3]"), std::string::npos) << msg;
  }
}

TEST(Matmul, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  const auto loss = [](Graph&, const std::vector<Tensor>& x) {
    return ad::sum(ad::matmul(x[0], x[1]));
  };
  EXPECT_LT(gradcheck(loss, {random_array({4, 3}, rng), random_array({3, 5}, rng)}), kOpTol);
}

TEST(Matmul, BatchedAndTransposedGradients) {
  std::mt19937_64 rng(2);
  const auto batched = [](Graph& g, const std::vector<Tensor>& x) {
    return project(g, ad::matmul(x[0], x[1]));
  };
  EXPECT_LT(gradcheck(batched, {random_array({3, 4, 2}, rng), random_array({3, 2, 5}, rng)}),
            kOpTol);
  const auto nt = [](Graph& g, const std::vector<Tensor>& x) {
    return project(g, ad::matmul_nt(x[0], x[1]));
  };
  EXPECT_LT(gradcheck(nt, {random_array({2, 4, 3}, rng), random_array({2, 5, 3}, rng)}), kOpTol);
  EXPECT_LT(gradcheck(nt, {random_array({4, 3}, rng), random_array({6, 3}, rng)}), kOpTol);
}

TEST(Matmul, MatchesNaiveProductOnRaggedShapes) {
  std::mt19937_64 rng(20);
  for (std::size_t m : {1, 7, 9, 17, 33}) {
    for (std::size_t n : {1, 5, 16, 19, 40}) {
      const std::size_t k = 1 + (m * n) % 23;
      const Array a = random_array({m, k}, rng), b = random_array({k, n}, rng);
      Graph g;
      const Tensor c = ad::matmul(g.constant(a), g.constant(b));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t p = 0; p < k; ++p) s += a.values[i * k + p] * b.values[p * n + j];
          EXPECT_NEAR(c.values()[i * n + j], s, 1e-12);
        }
      }
    }
  }
}

TEST(Matmul, RowsDoNotDependOnRowCount) {
  std::mt19937_64 rng(21);
  const Array b = random_array({37, 45}, rng);
  const Array big = random_array({41, 37}, rng);
  Graph g;
  const Tensor ref = ad::matmul(g.constant(big), g.constant(b));
  for (std::size_t m = 1; m <= 41; m += 4) {
    Array a({m, 37}, std::vector<double>(big.values.begin(), big.values.begin() + m * 37));
    const Tensor c = ad::matmul(g.constant(a), g.constant(b));
    for (std::size_t i = 0; i < m * 45; ++i) ASSERT_EQ(c.values()[i], ref.values()[i]);
  }
}

TEST(Conv1d, IdentityKernel) {
  Graph g;
  Tensor x = g.constant(Array({1, 4}, {1, 2, 3, 4}));
  Tensor k = g.constant(Array({1, 1, 1}, {1}));
  Tensor b = g.constant(Array({1}, {0}));
  EXPECT_EQ(vals(ad::conv1d(x, k, b, 1)), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Conv1d, StridedPairSum) {
  Graph g;
  Tensor x = g.constant(Array({1, 4}, {1, 2, 3, 4}));
  Tensor k = g.constant(Array({1, 1, 2}, {1, 1}));
  Tensor b = g.constant(Array({1}, {0}));
  Tensor y = ad::conv1d(x, k, b, 2);
  EXPECT_EQ(y.shape(), (ad::Shape{1, 2}));
  EXPECT_EQ(vals(y), (std::vector<double>{3, 7}));
}

TEST(Conv1d, KernelLongerThanInputIsDimensionError) {
  Graph g;
  Tensor x = g.constant(Array({1, 3}, 1.0));
  Tensor k = g.constant(Array({1, 1, 4}, 1.0));
  EXPECT_THROW(ad::conv1d(x, k, {}, 1), DimensionError);
}

TEST(Conv1d, KernelGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  const Array input = random_array({3, 96}, rng);
  const Array bias = random_array({16}, rng);
  const auto loss = [&](Graph& g, const std::vector<Tensor>& x) {
    return project(g, ad::conv1d(g.constant(input), x[0], g.constant(bias), 8));
  };
  EXPECT_LT(gradcheck(loss, {random_array({16, 3, 8}, rng)}), kOpTol);
}

TEST(Conv1d, AllGradientsBatchedOverlapping) {
  std::mt19937_64 rng(4);
  const auto loss = [](Graph& g, const std::vector<Tensor>& x) {
    return project(g, ad::conv1d(x[0], x[1], x[2], 2));
  };
  EXPECT_LT(gradcheck(loss, {random_array({2, 3, 11}, rng), random_array({4, 3, 3}, rng),
                             random_array({4}, rng)}),
            kOpTol);
}

TEST(Softmax, SymmetricRow) {
  Graph g;
  Tensor y = ad::softmax_rows(g.constant(Array({1, 2}, {0, 0})));
  EXPECT_DOUBLE_EQ(y.values()[0], 0.5);
  EXPECT_DOUBLE_EQ(y.values()[1], 0.5);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  Graph g;
  Tensor y = ad::softmax_rows(g.constant(Array({1, 3}, {1000, 1000, 1000})));
  for (double v : y.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(Softmax, RowsSumToOne) {
  std::mt19937_64 rng(5);
  Graph g;
  Tensor y = ad::softmax_rows(g.constant(random_array({6, 9}, rng, -20, 20)));
  for (std::size_t r = 0; r < 6; ++r) {
    double total = 0.0;
    for (std::size_t j = 0; j < 9; ++j) total += y.values()[r * 9 + j];
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Softmax, JacobianVectorProductMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  const auto loss = [](Graph& g, const std::vector<Tensor>& x) {
    return project(g, ad::softmax_rows(x[0]));
  };
  EXPECT_LT(gradcheck(loss, {random_array({5, 7}, rng, -3, 3)}), kOpTol);
}

TEST(LayerNorm, ConstantRowMapsToShift) {
  Graph g;
  Tensor y = ad::layer_norm(g.constant(Array({4}, 1.0)), g.constant(Array({4}, 1.0)),
                            g.constant(Array({4}, 0.0)));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(LayerNorm, TwoPointSymmetry) {
  const double eps = 1e-5;
  Graph g;
  Tensor y = ad::layer_norm(g.constant(Array({2}, {-1, 1})), g.constant(Array({2}, 1.0)),
                            g.constant(Array({2}, 3.0)), eps);
  EXPECT_NEAR(y.values()[0], 3.0 - 1.0 / std::sqrt(1.0 + eps), 1e-15);
  EXPECT_NEAR(y.values()[1], 3.0 + 1.0 / std::sqrt(1.0 + eps), 1e-15);
}

TEST(LayerNorm, SingleFeatureIsDegenerate) {
  Graph g;
  EXPECT_THROW(ad::layer_norm(g.constant(Array({3, 1}, 1.0)), g.constant(Array({1}, 1.0)),
                              g.constant(Array({1}, 0.0))),
               DimensionError);
}

TEST(LayerNorm, PreAffineRowsAreStandardized) {
  std::mt19937_64 rng(7);
  Graph g;
  const std::size_t d = 16;
  Tensor y = ad::layer_norm(g.constant(random_array({8, d}, rng, -5, 5)),
                            g.constant(Array({d}, 1.0)), g.constant(Array({d}, 0.0)), 1e-12);
  for (std::size_t r = 0; r < 8; ++r) {
    double mean = 0.0, var = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += y.values()[r * d + j];
    mean /= d;
    for (std::size_t j = 0; j < d; ++j) var += std::pow(y.values()[r * d + j] - mean, 2);
    var /= d;
    EXPECT_LT(std::abs(mean), 1e-6);
    EXPECT_LT(std::abs(var - 1.0), 1e-5);
  }
}

TEST(LayerNorm, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  const auto loss = [](Graph& g, const std::vector<Tensor>& x) {
    return project(g, ad::layer_norm(x[0], x[1], x[2], 1e-5));
  };
  EXPECT_LT(gradcheck(loss, {random_array({1, 10}, rng), random_array({10}, rng),
                             random_array({10}, rng)}),
            kOpTol);
  EXPECT_LT(gradcheck(loss, {random_array({3, 4, 6}, rng), random_array({6}, rng),
                             random_array({6}, rng)}),
            kOpTol);
}

TEST(Elementwise, ReluAndLoss) {
  Graph g;
  Tensor r = ad::relu(g.constant(Array({2}, {-2, 3})));
  EXPECT_EQ(vals(r), (std::vector<double>{0, 3}));
  Tensor y = g.constant(Array({2}, {0.5, -1}));
  EXPECT_EQ(ad::mse_loss(y, y).item(), 0.0);
  EXPECT_DOUBLE_EQ(
      ad::mse_loss(g.constant(Array({2}, {0, 0})), g.constant(Array({2}, {1, 3}))).item(), 5.0);
}

TEST(Elementwise, AddRejectsImplicitBroadcast) {
  Graph g;
  EXPECT_THROW(ad::add(g.constant(Array({2, 3}, 1.0)), g.constant(Array({3}, 1.0))),
               DimensionError);
  EXPECT_THROW(ad::add_broadcast(g.constant(Array({2, 3}, 1.0)), g.constant(Array({2}, 1.0))),
               DimensionError);
  EXPECT_THROW(ad::mse_loss(g.constant(Array({2}, 1.0)), g.constant(Array({3}, 1.0))),
               DimensionError);
}

TEST(Elementwise, GradientsOfShapeAndPointwiseOps) {
  std::mt19937_64 rng(9);
  const auto pointwise = [](Graph& g, const std::vector<Tensor>& x) {
    Tensor h = ad::add_broadcast(x[0], x[1]);
    h = ad::relu(ad::add(h, x[2]));
    h = ad::scale(h, -1.7);
    return project(g, h);
  };
  EXPECT_LT(gradcheck(pointwise, {random_array({2, 3, 4}, rng), random_array({3, 4}, rng),
                                  random_array({2, 3, 4}, rng)}),
            kOpTol);

  const auto shapes = [](Graph& g, const std::vector<Tensor>& x) {
    Tensor h = ad::concat(x[0], x[1], 1);           // [2,5,6]
    h = ad::transpose_last2(h);                     // [2,6,5]
    h = ad::slice(h, 1, 1, 5);                      // [2,4,5]
    h = ad::linear(h, x[2], x[3]);                  // [2,4,6]
    h = ad::merge_heads(ad::split_heads(h, 3), 3);  // round trip
    h = ad::split_heads(h, 2);                      // [4,4,3]
    return project(g, ad::flatten(h));
  };
  EXPECT_LT(gradcheck(shapes, {random_array({2, 2, 6}, rng), random_array({2, 3, 6}, rng),
                               random_array({5, 6}, rng), random_array({6}, rng)}),
            kOpTol);

  const auto loss = [](Graph&, const std::vector<Tensor>& x) {
    return ad::mse_loss(x[0], x[1]);
  };
  EXPECT_LT(gradcheck(loss, {random_array({3, 5}, rng), random_array({3, 5}, rng)}), kOpTol);
}

TEST(Elementwise, DropoutMaskIsSharedByBackward) {
  std::mt19937_64 rng(10);
  const Array input = random_array({4, 8}, rng);
  Graph g;
  Tensor x = g.parameter(input);
  std::mt19937_64 drop_rng(11);
  Tensor y = ad::dropout(x, 0.5, &drop_rng);
  g.backward(ad::sum(y));
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double kept = y.values()[i] / input.values[i];
    EXPECT_TRUE(kept == 0.0 || std::abs(kept - 2.0) < 1e-12);
    EXPECT_DOUBLE_EQ(x.grad()[i], kept);
  }
  Graph g2;
  Tensor same = ad::dropout(g2.constant(input), 0.5, nullptr);
  EXPECT_EQ(vals(same), input.values);
}

TEST(Backward, SumOfParameter) {
  Graph g;
  Tensor p = g.parameter(Array({1}, {4.2}));
  g.backward(ad::sum(p));
  EXPECT_EQ(p.grad()[0], 1.0);
}

TEST(Backward, QuadraticGivesParameter) {
  Graph g;
  Tensor p = g.parameter(Array({3}, {1.5, -2.0, 0.25}));
  Tensor q = ad::matmul(ad::reshape(p, {1, 3}), ad::reshape(p, {3, 1}));
  g.backward(ad::scale(ad::reshape(q, {1}), 0.5));
  EXPECT_EQ(vals(p), std::vector<double>(p.grad().begin(), p.grad().end()));
}

TEST(Backward, NonScalarLossIsContractError) {
  Graph g;
  Tensor p = g.parameter(Array({2}, 1.0));
  EXPECT_THROW(g.backward(p), ContractError);
}

TEST(Backward, GradientsAccumulateUntilZeroed) {
  Graph g;
  Tensor p = g.parameter(Array({2}, {1.0, 2.0}));
  Tensor loss = ad::sum(ad::scale(p, 3.0));
  g.backward(loss);
  g.backward(loss);
  EXPECT_EQ(p.grad()[0], 6.0);
  g.zero_grad();
  g.backward(loss);
  EXPECT_EQ(p.grad()[1], 3.0);
}

TEST(Graph, RecordsAreTopological) {
  std::mt19937_64 rng(12);
  Graph g;
  Tensor a = g.parameter(random_array({3, 4}, rng));
  Tensor b = g.constant(random_array({4, 2}, rng));
  Tensor c = ad::softmax_rows(ad::matmul(a, b));
  ad::sum(ad::relu(c));
  for (const auto& rec : g.records()) {
    for (std::size_t in : rec.inputs) EXPECT_LT(in, rec.output) << rec.op;
  }
}

TEST(Graph, ForwardIsDeterministic) {
  auto run = [] {
    std::mt19937_64 rng(13);
    Graph g;
    Tensor x = g.constant(random_array({5, 6}, rng));
    Tensor w = g.constant(random_array({6, 6}, rng));
    Tensor y = ad::layer_norm(ad::softmax_rows(ad::linear(x, w, {})),
                              g.constant(Array({6}, 1.0)), g.constant(Array({6}, 0.0)));
    return vals(y);
  };
  EXPECT_EQ(run(), run());
}
