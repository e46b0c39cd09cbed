#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spinal {

/// Dimension sizes, outermost first. An empty shape denotes a scalar.
using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

namespace detail {

struct Node;

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  // Empty until the first gradient is accumulated.
  std::vector<double> grad;
  bool requires_grad = false;
  // Null for leaves and constants.
  std::shared_ptr<Node> grad_fn;
};

using ImplPtr = std::shared_ptr<TensorImpl>;

// Reads the output gradient and accumulates into every input that requires grad.
using BackwardFn = std::function<void(std::span<const double> out_grad,
                                      std::span<const ImplPtr> inputs)>;

struct Node {
  std::uint64_t sequence = 0;
  const char* name = "";
  std::vector<ImplPtr> inputs;
  BackwardFn backward;
};

// Zero-initializes impl.grad on first use and returns it.
std::span<double> ensure_grad(TensorImpl& impl);

}  // namespace detail

/// Dense row-major tensor of doubles with an optional gradient slot.
///
/// A Tensor is a shared handle: copies refer to the same storage. Results of
/// operations are fresh tensors; the only mutating entry points are
/// mutable_data() and the gradient accessors, which the optimizer uses between
/// steps, outside of any recorded graph.
class Tensor {
 public:
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  /// Builds an n x m matrix from nested rows; all rows must have equal length.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows,
                       bool requires_grad = false);
  static Tensor vector(std::initializer_list<double> values, bool requires_grad = false);

  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return impl_->data.size(); }

  std::span<const double> data() const { return impl_->data; }
  std::span<double> mutable_data() { return impl_->data; }
  double item() const;
  /// Element at a multi-index; bounds-checked.
  double at(std::initializer_list<std::size_t> index) const;

  bool requires_grad() const { return impl_->requires_grad; }
  bool is_leaf() const { return impl_->grad_fn == nullptr; }
  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<const double> grad() const { return impl_->grad; }
  std::span<double> mutable_grad() { return detail::ensure_grad(*impl_); }
  void zero_grad();

  /// A new leaf sharing no graph history; data is copied.
  Tensor detach() const;
  /// True when both handles refer to the same storage.
  bool same_as(const Tensor& other) const { return impl_ == other.impl_; }

  const detail::ImplPtr& impl() const { return impl_; }
  explicit Tensor(detail::ImplPtr impl);

 private:
  detail::ImplPtr impl_;
};

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

}  // namespace spinal
