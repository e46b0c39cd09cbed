#include "spinal/spinal_layer.hpp"

#include <cmath>
#include <string>

#include "spinal/autograd.hpp"
#include "spinal/errors.hpp"
#include "spinal/ops.hpp"

namespace spinal {

void SpinalConfig::validate() const {
  if (input_width == 0 || num_sublayers == 0 || sublayer_width == 0 || num_segments == 0 || output_width == 0) {
    throw ConfigError("spinal: widths and counts must be positive");
  }
  if (num_segments > num_sublayers) {
    throw ConfigError("spinal: " + std::to_string(num_segments) + " segments exceed " + std::to_string(num_sublayers) +
                      " sub-layers");
  }
  if (num_segments > input_width) {
    throw ConfigError("spinal: " + std::to_string(num_segments) + " segments exceed input width " +
                      std::to_string(input_width));
  }
  if (!sublayer_activations.empty() && sublayer_activations.size() != num_sublayers) {
    throw ConfigError("spinal: " + std::to_string(sublayer_activations.size()) + " activations for " +
                      std::to_string(num_sublayers) + " sub-layers");
  }
  if (!(sublayer_dropout >= 0.0 && sublayer_dropout < 1.0)) {
    throw ConfigError("spinal: sub-layer dropout must lie in [0, 1)");
  }
}

Activation SpinalConfig::activation(std::size_t sublayer) const {
  return sublayer_activations.empty() ? Activation::relu : sublayer_activations.at(sublayer);
}

std::vector<std::size_t> SpinalConfig::segment_widths() const {
  std::vector<std::size_t> widths(num_segments, input_width / num_segments);
  for (std::size_t s = 0; s < input_width % num_segments; ++s) ++widths[s];
  return widths;
}

std::vector<std::size_t> SpinalConfig::segment_offsets() const {
  const auto widths = segment_widths();
  std::vector<std::size_t> offsets(widths.size(), 0);
  for (std::size_t s = 1; s < widths.size(); ++s) offsets[s] = offsets[s - 1] + widths[s - 1];
  return offsets;
}

std::size_t SpinalConfig::sublayer_input_width(std::size_t sublayer) const {
  return segment_widths()[segment_of(sublayer)] + (sublayer > 0 ? sublayer_width : 0);
}

std::size_t SpinalConfig::multiplication_count() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < num_sublayers; ++i) total += sublayer_width * sublayer_input_width(i);
  return total + output_width * num_sublayers * sublayer_width;
}

std::size_t SpinalConfig::parameter_count() const {
  return multiplication_count() + num_sublayers * sublayer_width + (output_bias ? output_width : 0);
}

std::size_t SpinalConfig::nonlinear_unit_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < num_sublayers; ++i) {
    if (is_nonlinear(activation(i))) n += sublayer_width;
  }
  return n;
}

SpinalLayer::SpinalLayer(SpinalConfig config, Rng& rng)
    : config_(std::move(config)), out_weight_(Tensor::scalar(0.0)) {
  config_.validate();
  const auto m = config_.sublayer_width;
  for (std::size_t i = 0; i < config_.num_sublayers; ++i) {
    const auto fan_in = config_.sublayer_input_width(i);
    sub_weights_.push_back(init_uniform_fan_in({m, fan_in}, fan_in, rng));
    sub_biases_.push_back(init_uniform_fan_in({m}, fan_in, rng));
  }
  const auto hidden = config_.num_sublayers * m;
  out_weight_ = init_uniform_fan_in({config_.output_width, hidden}, hidden, rng);
  if (config_.output_bias) out_bias_ = init_uniform_fan_in({config_.output_width}, hidden, rng);
}

SpinalLayer::SpinalLayer(SpinalConfig config, std::vector<Tensor> sub_weights, std::vector<Tensor> sub_biases,
                         Tensor out_weight, std::optional<Tensor> out_bias)
    : config_(std::move(config)),
      sub_weights_(std::move(sub_weights)),
      sub_biases_(std::move(sub_biases)),
      out_weight_(std::move(out_weight)),
      out_bias_(std::move(out_bias)) {
  config_.validate();
  check_shapes();
}

void SpinalLayer::check_shapes() const {
  const auto m = config_.sublayer_width;
  if (sub_weights_.size() != config_.num_sublayers || sub_biases_.size() != config_.num_sublayers) {
    throw ShapeError("spinal: expected " + std::to_string(config_.num_sublayers) + " sub-layer weight/bias pairs");
  }
  for (std::size_t i = 0; i < config_.num_sublayers; ++i) {
    const Shape expect_w{m, config_.sublayer_input_width(i)};
    if (sub_weights_[i].shape() != expect_w) {
      throw ShapeError("spinal: sub-layer " + std::to_string(i) + " weight " + to_string(sub_weights_[i].shape()) +
                       ", expected " + to_string(expect_w));
    }
    if (sub_biases_[i].shape() != Shape{m}) {
      throw ShapeError("spinal: sub-layer " + std::to_string(i) + " bias " + to_string(sub_biases_[i].shape()));
    }
  }
  const Shape expect_out{config_.output_width, config_.num_sublayers * m};
  if (out_weight_.shape() != expect_out) {
    throw ShapeError("spinal: output weight " + to_string(out_weight_.shape()) + ", expected " + to_string(expect_out));
  }
  if (config_.output_bias != out_bias_.has_value()) throw ShapeError("spinal: output bias presence mismatch");
  if (out_bias_ && out_bias_->shape() != Shape{config_.output_width}) {
    throw ShapeError("spinal: output bias " + to_string(out_bias_->shape()));
  }
}

Tensor SpinalLayer::forward(const Tensor& x, ForwardContext& ctx) const {
  if (x.rank() != 2 || x.dim(1) != config_.input_width) {
    throw ShapeError("spinal: expected n x " + std::to_string(config_.input_width) + " input, got " + to_string(x.shape()));
  }
  const auto widths = config_.segment_widths();
  const auto offsets = config_.segment_offsets();
  std::vector<Tensor> segments;
  segments.reserve(widths.size());
  for (std::size_t s = 0; s < widths.size(); ++s) segments.push_back(slice_last_dim(x, offsets[s], widths[s]));

  std::vector<Tensor> hidden;
  hidden.reserve(config_.num_sublayers);
  for (std::size_t i = 0; i < config_.num_sublayers; ++i) {
    Tensor in = segments[config_.segment_of(i)];
    if (i > 0) {
      const Tensor parts[] = {in, hidden.back()};
      in = concat_last_dim(parts);
    }
    in = dropout(in, config_.sublayer_dropout, ctx);
    hidden.push_back(
        apply_activation(config_.activation(i), broadcast_add_bias(matmul_transposed(in, sub_weights_[i]), sub_biases_[i])));
  }
  Tensor out = matmul_transposed(concat_last_dim(hidden), out_weight_);
  if (out_bias_) out = broadcast_add_bias(out, *out_bias_);
  return out;
}

std::vector<Tensor> SpinalLayer::parameters() const {
  std::vector<Tensor> params;
  for (std::size_t i = 0; i < sub_weights_.size(); ++i) {
    params.push_back(sub_weights_[i]);
    params.push_back(sub_biases_[i]);
  }
  params.push_back(out_weight_);
  if (out_bias_) params.push_back(*out_bias_);
  return params;
}

Tensor ShallowNet::forward(const Tensor& x) const {
  const Tensor hidden = apply_activation(act, broadcast_add_bias(matmul_transposed(x, hidden_weight), hidden_bias));
  return broadcast_add_bias(matmul_transposed(hidden, out_weight), out_bias);
}

SpinalLayer build_equivalent_spinal(const ShallowNet& net, std::size_t block_width) {
  const auto& W = net.hidden_weight;
  const auto& V = net.out_weight;
  if (W.rank() != 2 || net.hidden_bias.shape() != Shape{W.dim(0)} || V.rank() != 2 || V.dim(1) != W.dim(0) ||
      net.out_bias.shape() != Shape{V.dim(0)}) {
    throw ShapeError("build_equivalent_spinal: inconsistent shallow network shapes");
  }
  const std::size_t H = W.dim(0);
  const std::size_t d = W.dim(1);
  const std::size_t outputs = V.dim(0);
  const std::size_t m = block_width;
  if (m == 0 || H % m != 0) {
    throw ConfigError("build_equivalent_spinal: hidden width " + std::to_string(H) + " is not a multiple of block width " +
                      std::to_string(m));
  }
  if (d < 2) throw ConfigError("build_equivalent_spinal: input width must be at least 2");

  const std::size_t blocks = H / m;
  SpinalConfig cfg;
  cfg.input_width = d;
  cfg.num_sublayers = 2 * blocks;
  cfg.sublayer_width = m;
  cfg.num_segments = 2;
  cfg.output_width = outputs;
  cfg.output_bias = true;
  for (std::size_t j = 0; j < blocks; ++j) {
    cfg.sublayer_activations.push_back(Activation::identity);
    cfg.sublayer_activations.push_back(net.act);
  }
  const auto seg = cfg.segment_widths();
  const std::size_t d1 = seg[0];
  const std::size_t d2 = seg[1];
  const auto w = W.data();
  const auto b = net.hidden_bias.data();

  std::vector<Tensor> sub_w;
  std::vector<Tensor> sub_b;
  for (std::size_t j = 0; j < blocks; ++j) {
    // Partial sum over the first half; the carry from the previous block stays zero.
    const std::size_t first_cols = d1 + (j > 0 ? m : 0);
    std::vector<double> partial(m * first_cols, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < d1; ++c) partial[r * first_cols + c] = w[(j * m + r) * d + c];
    }
    sub_w.emplace_back(Shape{m, first_cols}, std::move(partial));
    sub_b.push_back(Tensor::zeros({m}));

    // Second half plus an identity carry of the partial sum, then bias and activation.
    const std::size_t second_cols = d2 + m;
    std::vector<double> complete(m * second_cols, 0.0);
    std::vector<double> bias(m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < d2; ++c) complete[r * second_cols + c] = w[(j * m + r) * d + d1 + c];
      complete[r * second_cols + d2 + r] = 1.0;
      bias[r] = b[j * m + r];
    }
    sub_w.emplace_back(Shape{m, second_cols}, std::move(complete));
    sub_b.emplace_back(Shape{m}, std::move(bias));
  }

  const std::size_t hidden_slots = cfg.num_sublayers * m;
  std::vector<double> out_w(outputs * hidden_slots, 0.0);
  const auto v = V.data();
  for (std::size_t o = 0; o < outputs; ++o) {
    for (std::size_t j = 0; j < blocks; ++j) {
      for (std::size_t r = 0; r < m; ++r) out_w[o * hidden_slots + (2 * j + 1) * m + r] = v[o * H + j * m + r];
    }
  }
  return SpinalLayer(std::move(cfg), std::move(sub_w), std::move(sub_b), Tensor({outputs, hidden_slots}, std::move(out_w)),
                     net.out_bias.detach());
}

std::vector<double> direct_gradient_probe(const SpinalLayer& layer, const Tensor& x, const Tensor& target) {
  auto fresh = [](const Tensor& t) { return Tensor(t.shape(), {t.data().begin(), t.data().end()}, true); };
  std::vector<Tensor> sub_w;
  std::vector<Tensor> sub_b;
  for (const auto& t : layer.sub_weights()) sub_w.push_back(fresh(t));
  for (const auto& t : layer.sub_biases()) sub_b.push_back(fresh(t));
  std::optional<Tensor> out_b;
  if (layer.out_bias()) out_b = fresh(*layer.out_bias());
  const SpinalLayer probe(layer.config(), sub_w, sub_b, fresh(layer.out_weight()), out_b);

  ForwardContext ctx;
  const Tensor diff = sub(probe.forward(x, ctx), target);
  backward(mean(mul_elementwise(diff, diff)));

  std::vector<double> norms;
  norms.reserve(sub_w.size());
  for (const auto& w : sub_w) {
    double s = 0.0;
    for (double g : w.grad()) s += g * g;
    norms.push_back(std::sqrt(s));
  }
  return norms;
}

}  // namespace spinal
