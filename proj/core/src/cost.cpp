#include "spinal/cost.hpp"

#include "spinal/errors.hpp"

namespace spinal {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

CostReport analyze_cost(const ModelSpec& model) {
  const auto shapes = model.infer_shapes();
  CostReport report;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& desc = model.layers[i];
    const Shape& in = shapes[i];
    const Shape& out = shapes[i + 1];
    LayerCost cost;
    cost.id = std::to_string(i) + ":" + std::string(kind_name(desc));
    std::visit(Overloaded{[&](const LinearDesc& d) {
                            cost.params = d.out * d.in + d.out;
                            cost.mults = d.out * d.in;
                            cost.activations = is_nonlinear(d.act) ? d.out : 0;
                            cost.fully_connected = true;
                          },
                          [&](const Conv2dDesc& d) {
                            const std::uint64_t kk = d.kernel * d.kernel;
                            cost.params = d.out_channels * d.in_channels * kk + d.out_channels;
                            cost.mults = d.out_channels * d.in_channels * kk * out[1] * out[2];
                          },
                          [&](const ActivationDesc& d) { cost.activations = is_nonlinear(d.act) ? numel(in) : 0; },
                          [&](const SpinalDesc& d) {
                            cost.params = d.config.parameter_count();
                            cost.mults = d.config.multiplication_count();
                            cost.activations = d.config.nonlinear_unit_count();
                            cost.fully_connected = true;
                          },
                          [](const auto&) {}},
               desc);
    report.total_params += cost.params;
    report.total_mults += cost.mults;
    if (cost.fully_connected) {
      report.fc_mults += cost.mults;
      report.fc_activations += cost.activations;
    }
    report.per_layer.push_back(std::move(cost));
  }
  return report;
}

std::uint64_t count_params(const ModelSpec& model) { return analyze_cost(model).total_params; }

MultCounts count_mults(const ModelSpec& model) {
  const auto r = analyze_cost(model);
  return {r.total_mults, r.fc_mults};
}

std::uint64_t count_activations(const ModelSpec& model) { return analyze_cost(model).fc_activations; }

double reduction_percent(double reference, double candidate) {
  if (reference == 0.0) throw ContractError("reduction_percent: zero reference");
  return 100.0 * (1.0 - candidate / reference);
}

nlohmann::json CostReport::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : per_layer) {
    layers.push_back({{"id", l.id},
                      {"params", l.params},
                      {"mults", l.mults},
                      {"activations", l.activations},
                      {"fully_connected", l.fully_connected}});
  }
  return {{"per_layer", layers},
          {"total_params", total_params},
          {"total_mults", total_mults},
          {"fc_mults", fc_mults},
          {"fc_activations", fc_activations}};
}

}  // namespace spinal
