#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spinal/config.hpp"
#include "spinal/model_spec.hpp"

namespace spinal {

/// 8 -> 200 -> 100 -> 1, relu hidden layers.
ModelSpec regression_baseline_spec(std::size_t num_vars = 8);
/// Spinal layer over num_vars inputs: 6 relu sub-layers of 50, two segments,
/// one linear output.
ModelSpec regression_spinal_spec(std::size_t num_vars = 8);

/// conv(1->10,k5), maxpool, relu, conv(10->20,k5), dropout, maxpool, relu,
/// flatten, linear(320->50, relu), linear(50->10), log_softmax.
ModelSpec mnist_cnn_spec(double conv_dropout = 0.5);
/// Same conv stack with a six-sub-layer spinal head of the given width.
ModelSpec mnist_spinal_cnn_spec(std::size_t width = 8, double conv_dropout = 0.5);

/// Adam lr 0.01, full batch, 1000/1000 samples, noise 0.2.
ExperimentConfig regression_experiment(const ModelSpec& model, RegressionTarget target, std::size_t epochs,
                                       std::vector<std::uint64_t> seeds);

/// SGD lr 0.05 momentum 0.5, batch 64, pixels in [0,1], standard MNIST
/// file names.
ExperimentConfig mnist_experiment(const ModelSpec& model, const std::filesystem::path& data_dir, std::size_t epochs,
                                  std::vector<std::uint64_t> seeds, std::size_t train_limit = 0);

}  // namespace spinal
