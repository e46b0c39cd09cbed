#include <benchmark/benchmark.h>

#include "spinal/autograd.hpp"
#include "spinal/layers.hpp"
#include "spinal/model.hpp"
#include "spinal/ops.hpp"
#include "spinal/presets.hpp"
#include "spinal/spinal_layer.hpp"

using namespace spinal;

namespace {

Tensor random_input(Shape shape, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return Tensor(std::move(shape), std::move(v));
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_input({n, n}, 1);
  const auto b = random_input({n, n}, 2);
  NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128)->Arg(320);

void BM_Conv2dMnistFirstLayer(benchmark::State& state) {
  Rng rng(3);
  Conv2dLayer layer(1, 10, 5, rng);
  const auto x = random_input({static_cast<std::size_t>(state.range(0)), 1, 28, 28}, 4);
  ForwardContext ctx;
  NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(layer.forward(x, ctx));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Conv2dMnistFirstLayer)->Arg(1)->Arg(64);

void BM_LinearHead(benchmark::State& state) {
  Rng rng(5);
  LinearLayer fc1(320, 50, Activation::relu, rng);
  LinearLayer fc2(50, 10, Activation::identity, rng);
  const auto x = random_input({64, 320}, 6);
  ForwardContext ctx;
  NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(fc2.forward(fc1.forward(x, ctx), ctx));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_LinearHead);

void BM_SpinalHead(benchmark::State& state) {
  SpinalConfig c;
  c.input_width = 320;
  c.num_sublayers = 6;
  c.sublayer_width = static_cast<std::size_t>(state.range(0));
  c.num_segments = 2;
  c.output_width = 10;
  Rng rng(7);
  SpinalLayer layer(c, rng);
  const auto x = random_input({64, 320}, 8);
  ForwardContext ctx;
  NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(layer.forward(x, ctx));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_SpinalHead)->Arg(8)->Arg(10);

// One forward and backward pass over a batch of 64 MNIST-shaped images.
void BM_TrainStep(benchmark::State& state) {
  Rng rng(9);
  const auto model = build_model(state.range(0) == 0 ? mnist_cnn_spec() : mnist_spinal_cnn_spec(8), rng);
  const auto x = random_input({64, 1, 28, 28}, 10);
  Rng drop(11);
  for (auto _ : state) {
    ForwardContext ctx{Mode::train, &drop};
    for (auto& p : model.parameters()) p.zero_grad();
    backward(sum(model.forward(x, ctx)));
  }
  state.SetLabel(state.range(0) == 0 ? "cnn" : "cnn-spinal-8");
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
