#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spinal/layers.hpp"
#include "spinal/tensor.hpp"

namespace spinal {

/// Shape and activations of a spinal layer.
///
/// The input vector is cut into `num_segments` contiguous pieces. When
/// `input_width` is not a multiple of the segment count, the first
/// `input_width % num_segments` pieces carry one extra feature. Sub-layer i
/// reads piece `i % num_segments`; every sub-layer after the first also reads
/// the output of its predecessor (the carry). The output row is a linear map
/// over all sub-layer outputs.
struct SpinalConfig {
  std::size_t input_width = 0;
  std::size_t num_sublayers = 0;
  std::size_t sublayer_width = 0;
  std::size_t num_segments = 2;
  std::size_t output_width = 0;
  /// One entry per sub-layer, or empty for relu everywhere.
  std::vector<Activation> sublayer_activations;
  bool output_bias = true;
  /// Dropout applied to each sub-layer input in train mode.
  double sublayer_dropout = 0.0;

  /// Throws ConfigError when a count is zero, k > L, k > input_width, the
  /// activation list has the wrong length, or the dropout rate is invalid.
  void validate() const;

  Activation activation(std::size_t sublayer) const;
  std::vector<std::size_t> segment_widths() const;
  std::vector<std::size_t> segment_offsets() const;
  std::size_t segment_of(std::size_t sublayer) const { return sublayer % num_segments; }
  /// Width of sub-layer i's input: its segment plus the carry for i > 0.
  std::size_t sublayer_input_width(std::size_t sublayer) const;

  std::size_t parameter_count() const;
  std::size_t multiplication_count() const;
  /// Number of hidden units followed by a nonlinearity.
  std::size_t nonlinear_unit_count() const;

  bool operator==(const SpinalConfig&) const = default;
};

class SpinalLayer final : public Layer {
 public:
  /// Random fan-in initialization of every block.
  SpinalLayer(SpinalConfig config, Rng& rng);
  /// Explicit weights. sub_weights[i] is m x sublayer_input_width(i) with the
  /// segment columns first and the carry columns last; out_weight is
  /// output_width x (L*m).
  SpinalLayer(SpinalConfig config, std::vector<Tensor> sub_weights, std::vector<Tensor> sub_biases, Tensor out_weight,
              std::optional<Tensor> out_bias);

  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::vector<Tensor> parameters() const override;
  std::string_view kind() const override { return "spinal"; }

  const SpinalConfig& config() const { return config_; }
  const std::vector<Tensor>& sub_weights() const { return sub_weights_; }
  const std::vector<Tensor>& sub_biases() const { return sub_biases_; }
  const Tensor& out_weight() const { return out_weight_; }
  const std::optional<Tensor>& out_bias() const { return out_bias_; }

 private:
  void check_shapes() const;

  SpinalConfig config_;
  std::vector<Tensor> sub_weights_;
  std::vector<Tensor> sub_biases_;
  Tensor out_weight_;
  std::optional<Tensor> out_bias_;
};

/// A single-hidden-layer network: y = V * act(W x + b) + c.
struct ShallowNet {
  Tensor hidden_weight;  // H x d
  Tensor hidden_bias;    // H
  Activation act = Activation::tanh;
  Tensor out_weight;  // o x H
  Tensor out_bias;    // o

  Tensor forward(const Tensor& x) const;
};

/// Builds a spinal layer whose forward pass equals `net` exactly.
///
/// Hidden neurons are grouped into blocks of `block_width`. Each block becomes
/// a pair of sub-layers on a two-segment input: an identity sub-layer that
/// forms the partial weighted sum over the first input half, then a sub-layer
/// that adds the second-half sum, the carried partial sum (identity carry) and
/// the bias before applying the activation. Carries into identity sub-layers
/// and output weights on identity sub-layers are zero, so only the activated
/// sub-layers reach the output row, weighted by the matching columns of V.
///
/// Throws ConfigError when H is not a multiple of block_width or d < 2.
SpinalLayer build_equivalent_spinal(const ShallowNet& net, std::size_t block_width = 2);

/// Frobenius norm of d(loss)/d(sub_weights[i]) for every sub-layer, with loss
/// the mean squared error between layer(x) and target in eval mode.
std::vector<double> direct_gradient_probe(const SpinalLayer& layer, const Tensor& x, const Tensor& target);

}  // namespace spinal
