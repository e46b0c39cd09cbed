#pragma once

#include <memory>
#include <vector>

#include "spinal/layers.hpp"
#include "spinal/model_spec.hpp"

namespace spinal {

/// Layers applied in order.
class Sequential final : public Layer {
 public:
  Sequential() = default;
  explicit Sequential(std::vector<std::unique_ptr<Layer>> layers) : layers_(std::move(layers)) {}

  void append(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

  Tensor forward(const Tensor& x, ForwardContext& ctx) const override;
  std::vector<Tensor> parameters() const override;
  std::string_view kind() const override { return "sequential"; }

  std::size_t size() const { return layers_.size(); }
  const Layer& operator[](std::size_t i) const { return *layers_.at(i); }

  /// Scalar count over all parameters.
  std::size_t parameter_count() const;

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// Validates `spec` and instantiates every layer with fan-in initialization.
Sequential build_model(const ModelSpec& spec, Rng& rng);

}  // namespace spinal
