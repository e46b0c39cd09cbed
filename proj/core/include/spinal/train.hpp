#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "spinal/data.hpp"
#include "spinal/model.hpp"
#include "spinal/tensor.hpp"

namespace spinal {

// --- losses ---------------------------------------------------------------

/// Mean of (pred - target)^2 over all elements; shapes must match.
Tensor mse_loss(const Tensor& pred, const Tensor& target);
/// Mean over the batch of -log_probs[i, class_ids[i]].
Tensor nll_loss(const Tensor& log_probs, std::span<const std::size_t> class_ids);
Tensor nll_loss(const Tensor& log_probs, const Tensor& class_ids);

// --- optimizers -----------------------------------------------------------

enum class OptimizerKind { sgd, adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double lr = 0.01;
  double momentum = 0.0;  // sgd only
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Owns moment buffers for a fixed parameter list.
///
/// step() applies one update from the accumulated gradients and then zeroes
/// them. Every parameter must hold a gradient; a missing one raises
/// ContractError before anything is modified.
class Optimizer {
 public:
  Optimizer(std::vector<Tensor> params, OptimizerConfig config);

  void step();
  void zero_grad();

  std::uint64_t steps() const { return t_; }
  const OptimizerConfig& config() const { return config_; }
  const std::vector<Tensor>& parameters() const { return params_; }
  /// Total scalar count across parameters.
  std::size_t parameter_count() const;

 private:
  std::vector<Tensor> params_;
  OptimizerConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t t_ = 0;
};

// --- fitting --------------------------------------------------------------

enum class Task { regression, classification };

/// One epoch of a training run. eval_metric is test MSE (regression) or test
/// accuracy as a fraction (classification); best_so_far is its running min or
/// max respectively.
struct MetricsRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double eval_metric = 0.0;
  double best_so_far = 0.0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
};

struct FitOptions {
  std::size_t epochs = 0;
  /// 0 means full batch.
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool eval_each_epoch = true;
  std::size_t eval_batch_size = 200;
  /// Called after each epoch; may be empty.
  std::function<void(const MetricsRecord&)> on_epoch;
};

Task task_of(const Dataset& data);

/// Test MSE or accuracy of the model in eval mode, without recording a graph.
double evaluate(const Sequential& model, const Dataset& data, std::size_t batch_size = 200);

/// Deterministic in (model initial state, datasets, options.seed). Dropout
/// runs in train mode while fitting and eval mode while evaluating. Throws
/// NumericError naming epoch and batch when the loss is not finite.
std::vector<MetricsRecord> fit(const Sequential& model, const Dataset& train, const Dataset& test, Optimizer& optimizer,
                               const FitOptions& options);

}  // namespace spinal
