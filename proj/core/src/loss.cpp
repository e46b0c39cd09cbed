#include "spinal/errors.hpp"
#include "spinal/ops.hpp"
#include "spinal/train.hpp"

namespace spinal {

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("mse_loss: prediction " + to_string(pred.shape()) + " vs target " + to_string(target.shape()));
  }
  const Tensor diff = sub(pred, target);
  return mean(mul_elementwise(diff, diff));
}

Tensor nll_loss(const Tensor& log_probs, std::span<const std::size_t> class_ids) {
  if (log_probs.rank() != 2 || log_probs.dim(0) != class_ids.size()) {
    throw ShapeError("nll_loss: " + std::to_string(class_ids.size()) + " labels for log-probs " + to_string(log_probs.shape()));
  }
  return scale(mean(select_per_row(log_probs, class_ids)), -1.0);
}

Tensor nll_loss(const Tensor& log_probs, const Tensor& class_ids) {
  std::vector<std::size_t> ids;
  ids.reserve(class_ids.numel());
  for (double v : class_ids.data()) ids.push_back(static_cast<std::size_t>(v));
  return nll_loss(log_probs, ids);
}

}  // namespace spinal
