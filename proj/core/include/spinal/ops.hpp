#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spinal/tensor.hpp"

namespace spinal {

// Every function below records a graph node when grad mode is enabled and at
// least one operand requires grad. Shape violations raise ShapeError.

/// a[m x k] * b[k x n].
Tensor matmul(const Tensor& a, const Tensor& b);
/// a[m x k] * b[n x k]^T, the layout used by weight matrices.
Tensor matmul_transposed(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul_elementwise(const Tensor& a, const Tensor& b);
/// Adds a 1-d bias across the last dimension of a.
Tensor broadcast_add_bias(const Tensor& a, const Tensor& bias);
Tensor scale(const Tensor& a, double factor);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

Tensor relu(const Tensor& x);
Tensor tanh_act(const Tensor& x);
/// Returns x itself.
Tensor identity_act(const Tensor& x);
/// Row-wise log-softmax of a 2-d tensor.
Tensor log_softmax(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);
Tensor concat_last_dim(std::span<const Tensor> parts);
Tensor slice_last_dim(const Tensor& x, std::size_t start, std::size_t length);
/// For x[n x c] returns out[n] with out[i] = x[i, indices[i]].
Tensor select_per_row(const Tensor& x, std::span<const std::size_t> indices);

/// Valid cross-correlation, stride 1, no padding.
/// x[n x c x h x w], weight[o x c x k x k], bias[o] -> [n x o x (h-k+1) x (w-k+1)].
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias);
/// 2x2 max pooling with stride 2; ties resolve to the first element in row-major order.
Tensor maxpool2d(const Tensor& x);

}  // namespace spinal
