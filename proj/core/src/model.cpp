#include "spinal/model.hpp"

namespace spinal {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Tensor Sequential::forward(const Tensor& x, ForwardContext& ctx) const {
  Tensor h = x;
  for (const auto& layer : layers_) h = layer->forward(h, ctx);
  return h;
}

std::vector<Tensor> Sequential::parameters() const {
  std::vector<Tensor> params;
  for (const auto& layer : layers_) {
    auto p = layer->parameters();
    params.insert(params.end(), p.begin(), p.end());
  }
  return params;
}

std::size_t Sequential::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.numel();
  return n;
}

Sequential build_model(const ModelSpec& spec, Rng& rng) {
  spec.infer_shapes();
  Sequential model;
  for (const auto& desc : spec.layers) {
    model.append(std::visit(
        Overloaded{[&](const LinearDesc& d) -> std::unique_ptr<Layer> { return std::make_unique<LinearLayer>(d.in, d.out, d.act, rng); },
                   [&](const Conv2dDesc& d) -> std::unique_ptr<Layer> {
                     return std::make_unique<Conv2dLayer>(d.in_channels, d.out_channels, d.kernel, rng);
                   },
                   [](const MaxPool2dDesc&) -> std::unique_ptr<Layer> { return std::make_unique<MaxPool2dLayer>(); },
                   [](const FlattenDesc&) -> std::unique_ptr<Layer> { return std::make_unique<FlattenLayer>(); },
                   [](const DropoutDesc& d) -> std::unique_ptr<Layer> { return std::make_unique<DropoutLayer>(d.rate); },
                   [](const ActivationDesc& d) -> std::unique_ptr<Layer> { return std::make_unique<ActivationLayer>(d.act); },
                   [&](const SpinalDesc& d) -> std::unique_ptr<Layer> { return std::make_unique<SpinalLayer>(d.config, rng); },
                   [](const LogSoftmaxDesc&) -> std::unique_ptr<Layer> { return std::make_unique<LogSoftmaxLayer>(); }},
        desc));
  }
  return model;
}

}  // namespace spinal
