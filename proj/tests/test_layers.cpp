#include <gtest/gtest.h>

#include "spinal/errors.hpp"
#include "spinal/layers.hpp"
#include "spinal/ops.hpp"
#include "support/oracles.hpp"

using namespace spinal;

namespace {

std::vector<double> vec(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

Tensor weighted_sum(const Tensor& y, const Tensor& w) { return sum(mul_elementwise(y, w)); }

}  // namespace

TEST(Linear, IdentityWeights) {
  LinearLayer layer(Tensor::matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), Tensor::zeros({3}), Activation::identity);
  ForwardContext ctx;
  auto x = Tensor::matrix({{1, -2, 3}, {0.5, 0, -7}});
  EXPECT_EQ(vec(layer.forward(x, ctx)), vec(x));
}

TEST(Linear, ZeroWeightsGiveActivatedBias) {
  LinearLayer layer(Tensor::zeros({2, 4}), Tensor::vector({-1, 3}), Activation::relu);
  ForwardContext ctx;
  auto y = layer.forward(Tensor::full({5, 4}, 9.0), ctx);
  for (std::size_t r = 0; r < 5; ++r) {
    EXPECT_EQ(y.at({r, 0}), 0.0);
    EXPECT_EQ(y.at({r, 1}), 3.0);
  }
}

TEST(Linear, MatchesLoopOracle) {
  Rng rng(1);
  std::mt19937_64 data_rng(2);
  LinearLayer layer(6, 4, Activation::tanh, rng);
  auto x = oracle::random_tensor({3, 6}, data_rng);
  ForwardContext ctx;
  auto y = layer.forward(x, ctx);
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t o = 0; o < 4; ++o) {
      double acc = layer.bias().data()[o];
      for (std::size_t i = 0; i < 6; ++i) acc += layer.weight().at({o, i}) * x.at({n, i});
      EXPECT_NEAR(y.at({n, o}), std::tanh(acc), 1e-12);
    }
}

TEST(Linear, RejectsWrongWidth) {
  Rng rng(1);
  LinearLayer layer(6, 4, Activation::relu, rng);
  ForwardContext ctx;
  EXPECT_THROW(layer.forward(Tensor::zeros({2, 5}), ctx), ShapeError);
}

TEST(Init, UniformWithinFanInBound) {
  Rng rng(3);
  auto w = init_uniform_fan_in({50, 16}, 16, rng);
  double lo = 1, hi = -1;
  for (double v : w.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GE(lo, -0.25);
  EXPECT_LE(hi, 0.25);
  EXPECT_LT(lo, -0.2);
  EXPECT_GT(hi, 0.2);
  EXPECT_TRUE(w.requires_grad());
}

TEST(Conv2d, UnitKernelIsIdentity) {
  Conv2dLayer layer(Tensor({1, 1, 1, 1}, {1.0}), Tensor::zeros({1}));
  std::mt19937_64 rng(4);
  auto x = oracle::random_tensor({2, 1, 5, 7}, rng);
  ForwardContext ctx;
  EXPECT_EQ(vec(layer.forward(x, ctx)), vec(x));
}

TEST(Conv2d, OnesKernelOnOnesField) {
  Conv2dLayer layer(Tensor::full({1, 1, 5, 5}, 1.0), Tensor::zeros({1}));
  ForwardContext ctx;
  auto y = layer.forward(Tensor::full({1, 1, 28, 28}, 1.0), ctx);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 24, 24}));
  for (double v : y.data()) EXPECT_EQ(v, 25.0);
}

TEST(Conv2d, MatchesSixLoopOracle) {
  std::mt19937_64 rng(5);
  for (auto [n, c, h, w, o, k] : {std::tuple{2, 3, 9, 8, 4, 3}, {1, 1, 28, 28, 10, 5}, {3, 10, 12, 12, 20, 5}}) {
    auto x = oracle::random_tensor({size_t(n), size_t(c), size_t(h), size_t(w)}, rng);
    auto wt = oracle::random_tensor({size_t(o), size_t(c), size_t(k), size_t(k)}, rng);
    auto b = oracle::random_tensor({size_t(o)}, rng);
    auto want = oracle::conv2d(vec(x), vec(wt), vec(b), n, c, h, w, o, k);
    auto got = conv2d(x, wt, b);
    ASSERT_EQ(got.numel(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) ASSERT_NEAR(got.data()[i], want[i], 1e-10) << i;
  }
}

TEST(Conv2d, ShapeErrors) {
  EXPECT_THROW(conv2d(Tensor::zeros({1, 2, 8, 8}), Tensor::zeros({3, 1, 3, 3}), Tensor::zeros({3})), ShapeError);
  EXPECT_THROW(conv2d(Tensor::zeros({1, 1, 2, 8}), Tensor::zeros({3, 1, 3, 3}), Tensor::zeros({3})), ShapeError);
  EXPECT_THROW(conv2d(Tensor::zeros({1, 1, 8, 8}), Tensor::zeros({3, 1, 3, 3}), Tensor::zeros({2})), ShapeError);
}

TEST(MaxPool, Basic) {
  auto y = maxpool2d(Tensor({1, 1, 2, 2}, {1, 2, 3, 4}));
  EXPECT_EQ(y.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(y.data()[0], 4.0);
  EXPECT_THROW(maxpool2d(Tensor::zeros({1, 1, 3, 4})), ShapeError);
}

TEST(MaxPool, MatchesOracle) {
  std::mt19937_64 rng(6);
  auto x = oracle::random_tensor({2, 3, 8, 6}, rng);
  EXPECT_EQ(vec(maxpool2d(x)), oracle::maxpool2(vec(x), 6, 8, 6));
}

TEST(MaxPool, GradientLandsOnMaxOnly) {
  auto x = Tensor({1, 1, 2, 4}, {1, 5, 2, 2, 3, 0, 2, 2}, true);
  backward(sum(scale(maxpool2d(x), 2.0)));
  // Window 1 max is 5 at index 1; window 2 is a four-way tie, first wins.
  EXPECT_EQ(std::vector<double>(x.grad().begin(), x.grad().end()), (std::vector<double>{0, 2, 2, 0, 0, 0, 0, 0}));
}

TEST(Flatten, RoundTrip) {
  FlattenLayer flat;
  ForwardContext ctx;
  std::mt19937_64 rng(7);
  auto x = oracle::random_tensor({2, 20, 4, 4}, rng);
  auto y = flat.forward(x, ctx);
  EXPECT_EQ(y.shape(), (Shape{2, 320}));
  EXPECT_EQ(vec(reshape(y, x.shape())), vec(x));
}

TEST(Dropout, RateZeroAndEvalAreIdentity) {
  std::mt19937_64 rng(8);
  auto x = oracle::random_tensor({4, 5}, rng);
  Rng drop(1);
  ForwardContext train{Mode::train, &drop};
  ForwardContext eval{Mode::eval, nullptr};
  EXPECT_EQ(vec(DropoutLayer(0.0).forward(x, train)), vec(x));
  EXPECT_EQ(vec(DropoutLayer(0.9).forward(x, eval)), vec(x));
  EXPECT_THROW(DropoutLayer(1.0), ConfigError);
  EXPECT_THROW(DropoutLayer(-0.1), ConfigError);
}

TEST(Dropout, TrainModePreservesMean) {
  auto x = Tensor::full({200000}, 2.0);
  Rng drop(9);
  ForwardContext train{Mode::train, &drop};
  auto y = DropoutLayer(0.5).forward(x, train);
  double total = 0;
  std::size_t zeros = 0;
  for (double v : y.data()) {
    total += v;
    zeros += v == 0.0;
    EXPECT_TRUE(v == 0.0 || v == 4.0);
  }
  EXPECT_NEAR(total / 200000.0, 2.0, 0.05 * 2.0);
  EXPECT_NEAR(zeros / 200000.0, 0.5, 0.01);
}

TEST(Dropout, TrainModeNeedsRng) {
  ForwardContext train{Mode::train, nullptr};
  EXPECT_THROW(DropoutLayer(0.5).forward(Tensor::zeros({3}), train), ContractError);
}

TEST(GradCheck, Linear) {
  Rng rng(10);
  std::mt19937_64 data_rng(11);
  for (auto act : {Activation::relu, Activation::tanh, Activation::identity}) {
    LinearLayer layer(5, 3, act, rng);
    auto x = oracle::random_tensor({4, 5}, data_rng, -1, 1, true);
    auto w = oracle::random_tensor({4, 3}, data_rng);
    ForwardContext ctx;
    auto f = [&] { return weighted_sum(layer.forward(x, ctx), w); };
    auto params = layer.parameters();
    params.push_back(x);
    EXPECT_LT(oracle::gradient_check(f, params), 1e-4) << to_string(act);
  }
}

TEST(GradCheck, Conv2d) {
  Rng rng(12);
  std::mt19937_64 data_rng(13);
  Conv2dLayer layer(2, 3, 3, rng);
  auto x = oracle::random_tensor({2, 2, 6, 5}, data_rng, -1, 1, true);
  auto w = oracle::random_tensor({2, 3, 4, 3}, data_rng);
  ForwardContext ctx;
  auto f = [&] { return weighted_sum(layer.forward(x, ctx), w); };
  auto params = layer.parameters();
  params.push_back(x);
  EXPECT_LT(oracle::gradient_check(f, params), 1e-4);
}

TEST(GradCheck, MaxPool) {
  std::mt19937_64 data_rng(14);
  auto x = oracle::random_tensor({2, 3, 4, 6}, data_rng, -1, 1, true);
  auto w = oracle::random_tensor({2, 3, 2, 3}, data_rng);
  auto f = [&] { return weighted_sum(maxpool2d(x), w); };
  EXPECT_LT(oracle::gradient_check(f, {x}), 1e-4);
}

TEST(GradCheck, DropoutEvalAndFixedMask) {
  std::mt19937_64 data_rng(15);
  auto x = oracle::random_tensor({3, 7}, data_rng, -1, 1, true);
  auto w = oracle::random_tensor({3, 7}, data_rng);
  DropoutLayer layer(0.4);
  ForwardContext eval{Mode::eval, nullptr};
  auto f = [&] { return weighted_sum(tanh_act(layer.forward(x, eval)), w); };
  EXPECT_LT(oracle::gradient_check(f, {x}), 1e-4);

  // Train mode with the mask held fixed by reseeding before every call.
  auto g = [&] {
    Rng drop(77);
    ForwardContext train{Mode::train, &drop};
    return weighted_sum(tanh_act(layer.forward(x, train)), w);
  };
  EXPECT_LT(oracle::gradient_check(g, {x}), 1e-4);
}

TEST(GradCheck, SmallCnnStack) {
  Rng rng(16);
  std::mt19937_64 data_rng(17);
  Conv2dLayer c1(1, 2, 3, rng);
  LinearLayer fc(2 * 3 * 3, 4, Activation::relu, rng);
  auto x = oracle::random_tensor({2, 1, 8, 8}, data_rng);
  const std::vector<std::size_t> ids{1, 3};
  ForwardContext ctx;
  auto f = [&] {
    auto h = relu(maxpool2d(c1.forward(x, ctx)));
    auto logits = fc.forward(reshape(h, {2, 18}), ctx);
    return scale(mean(select_per_row(log_softmax(logits), ids)), -1.0);
  };
  auto params = c1.parameters();
  for (auto& p : fc.parameters()) params.push_back(p);
  EXPECT_LT(oracle::gradient_check(f, params), 1e-4);
}
