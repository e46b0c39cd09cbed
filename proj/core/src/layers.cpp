#include "spinal/layers.hpp"

#include <cmath>

#include "spinal/errors.hpp"
#include "spinal/ops.hpp"

namespace spinal {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::identity:
      return "identity";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity" || name == "linear") return Activation::identity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Tensor apply_activation(Activation act, const Tensor& x) {
  switch (act) {
    case Activation::relu:
      return relu(x);
    case Activation::tanh:
      return tanh_act(x);
    case Activation::identity:
      return identity_act(x);
  }
  return x;
}

Tensor init_uniform_fan_in(Shape shape, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> data(numel(shape));
  for (auto& v : data) v = dist(rng);
  return Tensor(std::move(shape), std::move(data), true);
}

LinearLayer::LinearLayer(std::size_t in, std::size_t out, Activation act, Rng& rng)
    : weight_(init_uniform_fan_in({out, in}, in, rng)), bias_(init_uniform_fan_in({out}, in, rng)), act_(act) {}

LinearLayer::LinearLayer(Tensor weight, Tensor bias, Activation act)
    : weight_(std::move(weight)), bias_(std::move(bias)), act_(act) {
  if (weight_.rank() != 2 || bias_.rank() != 1 || bias_.dim(0) != weight_.dim(0)) {
    throw ShapeError("linear: weight " + to_string(weight_.shape()) + " and bias " + to_string(bias_.shape()) +
                     " are inconsistent");
  }
}

Tensor LinearLayer::forward(const Tensor& x, ForwardContext&) const {
  if (x.rank() != 2 || x.dim(1) != in_features()) {
    throw ShapeError("linear: expected n x " + std::to_string(in_features()) + " input, got " + to_string(x.shape()));
  }
  return apply_activation(act_, broadcast_add_bias(matmul_transposed(x, weight_), bias_));
}

Conv2dLayer::Conv2dLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng)
    : weight_(init_uniform_fan_in({out_channels, in_channels, kernel, kernel}, in_channels * kernel * kernel, rng)),
      bias_(init_uniform_fan_in({out_channels}, in_channels * kernel * kernel, rng)) {
  if (kernel == 0) throw ConfigError("conv2d: kernel size must be >= 1");
}

Conv2dLayer::Conv2dLayer(Tensor weight, Tensor bias) : weight_(std::move(weight)), bias_(std::move(bias)) {
  if (weight_.rank() != 4 || weight_.dim(2) != weight_.dim(3) || bias_.rank() != 1 || bias_.dim(0) != weight_.dim(0)) {
    throw ShapeError("conv2d: weight " + to_string(weight_.shape()) + " and bias " + to_string(bias_.shape()) +
                     " are inconsistent");
  }
}

Tensor Conv2dLayer::forward(const Tensor& x, ForwardContext&) const { return conv2d(x, weight_, bias_); }

Tensor MaxPool2dLayer::forward(const Tensor& x, ForwardContext&) const { return maxpool2d(x); }

Tensor FlattenLayer::forward(const Tensor& x, ForwardContext&) const {
  if (x.rank() < 2) throw ShapeError("flatten: expected a batched input, got " + to_string(x.shape()));
  return reshape(x, {x.dim(0), x.numel() / x.dim(0)});
}

DropoutLayer::DropoutLayer(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout: rate must lie in [0, 1), got " + std::to_string(rate));
}

Tensor DropoutLayer::forward(const Tensor& x, ForwardContext& ctx) const { return dropout(x, rate_, ctx); }

Tensor dropout(const Tensor& x, double rate, ForwardContext& ctx) {
  if (ctx.mode == Mode::eval || rate == 0.0) return x;
  if (ctx.rng == nullptr) throw ContractError("dropout: train mode requires a random generator");
  const double keep_scale = 1.0 / (1.0 - rate);
  std::bernoulli_distribution keep(1.0 - rate);
  std::vector<double> mask(x.numel());
  for (auto& m : mask) m = keep(*ctx.rng) ? keep_scale : 0.0;
  return mul_elementwise(x, Tensor(x.shape(), std::move(mask)));
}

Tensor ActivationLayer::forward(const Tensor& x, ForwardContext&) const { return apply_activation(act_, x); }

Tensor LogSoftmaxLayer::forward(const Tensor& x, ForwardContext&) const { return log_softmax(x); }

}  // namespace spinal
