#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "spinal/autograd.hpp"
#include "spinal/errors.hpp"
#include "spinal/ops.hpp"
#include "support/oracles.hpp"

using namespace spinal;

namespace {

void expect_values(const Tensor& t, std::vector<double> expected, double tol = 0.0) {
  ASSERT_EQ(t.numel(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(t.data()[i], expected[i], tol) << "element " << i;
}

}  // namespace

TEST(Tensor, ShapeMustMatchData) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), ShapeError);
  Tensor t({2, 3}, std::vector<double>(6, 1.0));
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_FALSE(t.has_grad());
}

TEST(Tensor, ReshapeLeavesOriginalShape) {
  auto x = Tensor::matrix({{1, 2, 3}, {4, 5, 6}});
  auto y = reshape(x, {3, 2});
  EXPECT_EQ(x.shape(), (Shape{2, 3}));
  EXPECT_EQ(y.shape(), (Shape{3, 2}));
  EXPECT_THROW(reshape(x, {4, 2}), ShapeError);
}

TEST(Matmul, IdentityLeft) {
  auto r = matmul(Tensor::matrix({{1, 0}, {0, 1}}), Tensor::matrix({{5, 6}, {7, 8}}));
  expect_values(r, {5, 6, 7, 8});
}

TEST(Matmul, RowTimesColumn) {
  auto r = matmul(Tensor::matrix({{1, 2}}), Tensor::matrix({{3}, {4}}));
  EXPECT_EQ(r.shape(), (Shape{1, 1}));
  EXPECT_EQ(r.data()[0], 11.0);
}

TEST(Matmul, MatchesTripleLoop) {
  std::mt19937_64 rng(7);
  for (auto [m, k, n] : {std::tuple{3, 4, 2}, {1, 9, 5}, {17, 3, 11}}) {
    auto a = oracle::random_tensor({std::size_t(m), std::size_t(k)}, rng);
    auto b = oracle::random_tensor({std::size_t(k), std::size_t(n)}, rng);
    auto want = oracle::matmul({a.data().begin(), a.data().end()}, {b.data().begin(), b.data().end()}, m, k, n);
    expect_values(matmul(a, b), want, 1e-12);
    expect_values(matmul_transposed(a, transpose(b)), want, 1e-12);
  }
}

TEST(Matmul, MismatchNamesBothShapes) {
  try {
    matmul(Tensor::zeros({2, 3}), Tensor::zeros({4, 2}));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("2x3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("4x2"), std::string::npos) << msg;
  }
}

TEST(Elementwise, Examples) {
  expect_values(add(Tensor::vector({1, 2}), Tensor::vector({0, 0})), {1, 2});
  expect_values(broadcast_add_bias(Tensor::zeros({2, 3}), Tensor::vector({1, 2, 3})), {1, 2, 3, 1, 2, 3});
  expect_values(mul_elementwise(Tensor::vector({2, 3}), Tensor::vector({4, 5})), {8, 15});
  expect_values(sub(Tensor::vector({2, 3}), Tensor::vector({4, 5})), {-2, -2});
  EXPECT_THROW(add(Tensor::zeros({2}), Tensor::zeros({3})), ShapeError);
  EXPECT_THROW(broadcast_add_bias(Tensor::zeros({2, 3}), Tensor::zeros({2})), ShapeError);
}

TEST(Activations, Examples) {
  expect_values(relu(Tensor::vector({-1, 0, 2})), {0, 0, 2});
  auto x = Tensor::vector({-0.3, 1e-300, 7.25});
  auto y = identity_act(x);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(std::bit_cast<std::uint64_t>(y.data()[i]), std::bit_cast<std::uint64_t>(x.data()[i]));
  expect_values(log_softmax(Tensor::matrix({{0, 0}})), {-std::log(2.0), -std::log(2.0)}, 1e-15);
  expect_values(tanh_act(Tensor::vector({0.5})), {std::tanh(0.5)}, 0.0);
}

TEST(LogSoftmax, StableForLargeLogits) {
  auto r = log_softmax(Tensor::matrix({{1000, 1000, 1000}}));
  for (double v : r.data()) EXPECT_NEAR(v, -std::log(3.0), 1e-12);
  EXPECT_THROW(log_softmax(Tensor::vector({1, 2})), ShapeError);
}

TEST(Backward, SumOfSquares) {
  auto w = Tensor::vector({3, -2}, true);
  backward(sum(mul_elementwise(w, w)));
  expect_values(Tensor({2}, {w.grad().begin(), w.grad().end()}), {6, -4});
}

TEST(Backward, ConstantLossIsNoOp) {
  auto c = sum(Tensor::vector({1, 2}));
  EXPECT_EQ(backward(c).nodes_visited, 0u);
}

TEST(Backward, NonScalarIsContractError) {
  auto w = Tensor::vector({1, 2}, true);
  EXPECT_THROW(backward(scale(w, 2.0)), ContractError);
}

TEST(Backward, LeafUsedTwiceAccumulates) {
  // f = sum(w*a) + sum(w*b) must give the same grad as sum(w*(a+b)).
  auto a = Tensor::vector({1, 2, 3});
  auto b = Tensor::vector({-4, 0.5, 2});
  auto w1 = Tensor::vector({0.1, 0.2, 0.3}, true);
  backward(add(sum(mul_elementwise(w1, a)), sum(mul_elementwise(w1, b))));
  auto w2 = Tensor::vector({0.1, 0.2, 0.3}, true);
  backward(sum(mul_elementwise(w2, add(a, b))));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(w1.grad()[i], w2.grad()[i]);
}

TEST(Backward, RepeatedCallsAccumulateOnLeaves) {
  auto w = Tensor::vector({1.5}, true);
  auto loss = sum(scale(w, 3.0));
  backward(loss);
  backward(loss);
  EXPECT_DOUBLE_EQ(w.grad()[0], 6.0);
}

TEST(Backward, VisitsEachNodeOnce) {
  auto x = Tensor::vector({0.5, -1}, true);
  auto y = tanh_act(x);        // 1
  auto z = add(y, y);          // 2
  auto s = mul_elementwise(z, y);  // 3
  auto loss = sum(s);          // 4
  EXPECT_EQ(Graph::collect(loss).size(), 4u);
  EXPECT_EQ(backward(loss).nodes_visited, 4u);
}

TEST(Graph, EntriesAreTopologicallyOrdered) {
  auto x = Tensor::vector({1, 2}, true);
  auto a = relu(x);
  auto b = scale(a, 2.0);
  auto c = add(a, b);
  auto g = Graph::collect(sum(c));
  const auto entries = g.entries();
  for (std::size_t i = 1; i < entries.size(); ++i) EXPECT_LT(entries[i - 1].node->sequence, entries[i].node->sequence);
  ASSERT_EQ(g.leaves().size(), 1u);
  EXPECT_TRUE(g.leaves()[0].same_as(x));
}

TEST(NoGrad, SuppressesRecording) {
  auto w = Tensor::vector({1, 2}, true);
  NoGradGuard guard;
  auto y = scale(w, 2.0);
  EXPECT_TRUE(y.is_leaf());
  EXPECT_FALSE(y.requires_grad());
}

TEST(SliceConcat, PartitionIdentity) {
  auto x = Tensor::vector({1, 2, 3, 4});
  expect_values(slice_last_dim(x, 0, 2), {1, 2});
  std::vector<Tensor> parts{slice_last_dim(x, 0, 3), slice_last_dim(x, 3, 1)};
  expect_values(concat_last_dim(parts), {1, 2, 3, 4});
  EXPECT_THROW(slice_last_dim(x, 3, 2), ShapeError);
}

TEST(SliceConcat, GradientRoutesToSourceHalves) {
  std::mt19937_64 rng(3);
  auto x = oracle::random_tensor({3, 6}, rng, -1, 1, true);
  auto w = oracle::random_tensor({3, 6}, rng);
  auto f = [&] {
    std::vector<Tensor> parts{tanh_act(slice_last_dim(x, 2, 4)), scale(slice_last_dim(x, 0, 2), 3.0)};
    return sum(mul_elementwise(concat_last_dim(parts), w));
  };
  EXPECT_LT(oracle::gradient_check(f, {x}), 1e-4);
}

TEST(GradCheck, ElementwiseAndReductions) {
  std::mt19937_64 rng(11);
  auto a = oracle::random_tensor({4, 3}, rng, -1, 1, true);
  auto b = oracle::random_tensor({4, 3}, rng, -1, 1, true);
  auto bias = oracle::random_tensor({3}, rng, -1, 1, true);
  auto f = [&] {
    auto t = broadcast_add_bias(sub(mul_elementwise(a, b), tanh_act(a)), bias);
    return add(mean(mul_elementwise(t, t)), scale(sum(relu(b)), 0.3));
  };
  EXPECT_LT(oracle::gradient_check(f, {a, b, bias}), 1e-4);
}

TEST(GradCheck, MatmulVariantsAndLogSoftmax) {
  std::mt19937_64 rng(12);
  auto a = oracle::random_tensor({3, 5}, rng, -1, 1, true);
  auto b = oracle::random_tensor({5, 4}, rng, -1, 1, true);
  auto c = oracle::random_tensor({2, 5}, rng, -1, 1, true);
  auto d = oracle::random_tensor({4, 5}, rng, -1, 1, true);
  const std::vector<std::size_t> ids{1, 3, 0};
  auto f = [&] {
    auto logits = add(matmul(a, b), transpose(matmul_transposed(d, a)));
    auto lp = log_softmax(logits);
    auto extra = sum(matmul_transposed(c, a));
    return add(scale(mean(select_per_row(lp, ids)), -1.0), scale(extra, 0.1));
  };
  EXPECT_LT(oracle::gradient_check(f, {a, b, c, d}), 1e-4);
}

TEST(GradCheck, RandomCompositeGraphs) {
  // Random chains of depth up to 6 over a fixed pool of unary and binary ops.
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = oracle::random_tensor({2, 4}, rng, -1, 1, true);
    auto y = oracle::random_tensor({2, 4}, rng, -1, 1, true);
    std::vector<int> ops;
    const int depth = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < depth; ++i) ops.push_back(static_cast<int>(rng() % 6));
    auto f = [&] {
      Tensor t = x;
      for (int op : ops) {
        switch (op) {
          case 0: t = tanh_act(t); break;
          case 1: t = add(t, y); break;
          case 2: t = mul_elementwise(t, y); break;
          case 3: t = scale(t, -1.7); break;
          case 4: t = sub(t, mul_elementwise(x, x)); break;
          default: t = reshape(transpose(reshape(t, {4, 2})), {2, 4}); break;
        }
      }
      return sum(mul_elementwise(t, t));
    };
    EXPECT_LT(oracle::gradient_check(f, {x, y}, 1e-5, true), 1e-4) << "trial " << trial;
  }
}

TEST(Determinism, RepeatedComputationIsBitIdentical) {
  auto run = [] {
    std::mt19937_64 rng(5);
    auto a = oracle::random_tensor({8, 8}, rng, -1, 1, true);
    auto b = oracle::random_tensor({8, 8}, rng);
    auto loss = sum(tanh_act(matmul(a, b)));
    backward(loss);
    std::vector<double> out{loss.item()};
    out.insert(out.end(), a.grad().begin(), a.grad().end());
    return out;
  };
  EXPECT_EQ(run(), run());
}
