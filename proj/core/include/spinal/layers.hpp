#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "spinal/seed.hpp"
#include "spinal/tensor.hpp"

namespace spinal {

enum class Activation { relu, tanh, identity };

std::string_view to_string(Activation act);
/// Accepts "relu", "tanh", "identity" (alias "linear"); throws ConfigError otherwise.
Activation parse_activation(std::string_view name);
Tensor apply_activation(Activation act, const Tensor& x);
inline bool is_nonlinear(Activation act) { return act != Activation::identity; }

enum class Mode { train, eval };


/// Per-call state threaded through forward passes.
struct ForwardContext {
  Mode mode = Mode::eval;
  /// Needed only by train-mode dropout.
  Rng* rng = nullptr;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, ForwardContext& ctx) const = 0;
  virtual std::vector<Tensor> parameters() const { return {}; }
  virtual std::string_view kind() const = 0;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) tensor flagged as a trainable leaf.
Tensor init_uniform_fan_in(Shape shape, std::size_t fan_in, Rng& rng);

class LinearLayer final : public Layer {
 public:
  LinearLayer(std::size_t in, std::size_t out, Activation act, Rng& rng);
  /// weight[out x in], bias[out].
  LinearLayer(Tensor weight, Tensor bias, Activation act);

  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::vector<Tensor> parameters() const override { return {weight_, bias_}; }
  std::string_view kind() const override { return "linear"; }

  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }
  Activation activation() const { return act_; }
  std::size_t in_features() const { return weight_.dim(1); }
  std::size_t out_features() const { return weight_.dim(0); }

 private:
  Tensor weight_;
  Tensor bias_;
  Activation act_;
};

class Conv2dLayer final : public Layer {
 public:
  Conv2dLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng);
  /// weight[out x in x k x k], bias[out].
  Conv2dLayer(Tensor weight, Tensor bias);

  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::vector<Tensor> parameters() const override { return {weight_, bias_}; }
  std::string_view kind() const override { return "conv2d"; }

  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

 private:
  Tensor weight_;
  Tensor bias_;
};

class MaxPool2dLayer final : public Layer {
 public:
  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::string_view kind() const override { return "maxpool2d"; }
};

/// n x c x h x w -> n x (c*h*w), row-major order preserved.
class FlattenLayer final : public Layer {
 public:
  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::string_view kind() const override { return "flatten"; }
};

/// Inverted dropout: train mode zeroes each element with probability rate and
/// scales survivors by 1/(1-rate); eval mode is the identity.
class DropoutLayer final : public Layer {
 public:
  explicit DropoutLayer(double rate);

  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::string_view kind() const override { return "dropout"; }
  double rate() const { return rate_; }

 private:
  double rate_;
};

Tensor dropout(const Tensor& x, double rate, ForwardContext& ctx);

class ActivationLayer final : public Layer {
 public:
  explicit ActivationLayer(Activation act) : act_(act) {}
  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::string_view kind() const override { return "activation"; }
  Activation activation() const { return act_; }

 private:
  Activation act_;
};

class LogSoftmaxLayer final : public Layer {
 public:
  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::string_view kind() const override { return "log_softmax"; }
};

}  // namespace spinal
