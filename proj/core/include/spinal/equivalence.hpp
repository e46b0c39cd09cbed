#pragma once

#include <cstdint>

#include "spinal/seed.hpp"
#include "spinal/spinal_layer.hpp"

namespace spinal {

/// Weights and biases uniform on [-scale, scale].
ShallowNet random_shallow_net(std::size_t input_width, std::size_t hidden_width, std::size_t output_width,
                              Activation act, Rng& rng, double scale = 1.0);

struct EquivalenceOptions {
  std::size_t hidden_width = 4;
  std::size_t input_width = 10;
  std::size_t output_width = 1;
  Activation act = Activation::tanh;
  std::size_t trials = 100;
  std::size_t inputs_per_trial = 100;
  std::size_t block_width = 2;
  std::uint64_t seed = 1;
  /// Zero every shallow weight and bias instead of sampling them.
  bool zero_weights = false;
};

struct EquivalenceReport {
  double max_abs_discrepancy = 0.0;
  std::size_t trials = 0;
  std::size_t evaluations = 0;
  std::size_t sublayers = 0;
};

/// Samples shallow nets and inputs on [-1, 1], builds the equivalent spinal
/// layer for each net and records the largest output difference.
EquivalenceReport run_equivalence(const EquivalenceOptions& options);

}  // namespace spinal
