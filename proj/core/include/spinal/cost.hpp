#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinal/model_spec.hpp"

namespace spinal {

struct LayerCost {
  std::string id;  // "<index>:<kind>"
  std::uint64_t params = 0;
  std::uint64_t mults = 0;
  std::uint64_t activations = 0;
  bool fully_connected = false;
};

/// Structural counts for one forward pass of a single sample.
///
/// Multiplications count weight-by-input products only; bias additions are
/// free. fc_* totals cover linear and spinal layers; fc_activations counts
/// hidden units in those layers that are followed by a nonlinearity.
struct CostReport {
  std::vector<LayerCost> per_layer;
  std::uint64_t total_params = 0;
  std::uint64_t total_mults = 0;
  std::uint64_t fc_mults = 0;
  std::uint64_t fc_activations = 0;

  nlohmann::json to_json() const;
};

CostReport analyze_cost(const ModelSpec& model);

std::uint64_t count_params(const ModelSpec& model);

struct MultCounts {
  std::uint64_t total = 0;
  std::uint64_t fully_connected = 0;
};
MultCounts count_mults(const ModelSpec& model);

std::uint64_t count_activations(const ModelSpec& model);

/// 100 * (1 - candidate / reference).
double reduction_percent(double reference, double candidate);

}  // namespace spinal
