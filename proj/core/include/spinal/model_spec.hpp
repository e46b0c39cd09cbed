#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spinal/layers.hpp"
#include "spinal/spinal_layer.hpp"
#include "spinal/tensor.hpp"

namespace spinal {

struct LinearDesc {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation act = Activation::identity;
  bool operator==(const LinearDesc&) const = default;
};

struct Conv2dDesc {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  bool operator==(const Conv2dDesc&) const = default;
};

struct MaxPool2dDesc {
  bool operator==(const MaxPool2dDesc&) const = default;
};

struct FlattenDesc {
  bool operator==(const FlattenDesc&) const = default;
};

struct DropoutDesc {
  double rate = 0.0;
  bool operator==(const DropoutDesc&) const = default;
};

struct ActivationDesc {
  Activation act = Activation::relu;
  bool operator==(const ActivationDesc&) const = default;
};

struct SpinalDesc {
  SpinalConfig config;
  bool operator==(const SpinalDesc&) const = default;
};

struct LogSoftmaxDesc {
  bool operator==(const LogSoftmaxDesc&) const = default;
};

using LayerDesc = std::variant<LinearDesc, Conv2dDesc, MaxPool2dDesc, FlattenDesc, DropoutDesc, ActivationDesc, SpinalDesc,
                               LogSoftmaxDesc>;

std::string_view kind_name(const LayerDesc& desc);

/// Declarative model: per-sample input shape plus an ordered layer list.
///
/// Text form, one descriptor per line, `#` starts a comment:
///
///     input 1x28x28
///     conv2d in=1 out=10 k=5
///     maxpool2d
///     relu                      (also: tanh, identity)
///     dropout rate=0.5
///     flatten
///     linear in=320 out=50 act=relu
///     spinal in=320 layers=6 width=8 segments=2 out=10 act=relu bias=1 dropout=0
///     log_softmax
///
/// A spinal line may give `acts=identity,tanh,...` instead of `act=` to set
/// each sub-layer's activation.
struct ModelSpec {
  Shape input_shape;
  std::vector<LayerDesc> layers;

  /// Throws SpecError on unknown kinds, missing keys, or malformed values.
  static ModelSpec parse(std::string_view text);
  /// Canonical text; parse(to_text()) reproduces *this.
  std::string to_text() const;

  /// Per-sample output shape after each layer (element 0 is the input shape).
  /// Throws SpecError when adjacent layers are incompatible.
  std::vector<Shape> infer_shapes() const;

  bool operator==(const ModelSpec&) const = default;
};

/// Parses one descriptor line (no `input` lines).
LayerDesc parse_layer_desc(std::string_view line);
std::string to_text(const LayerDesc& desc);

}  // namespace spinal
