#include "spinal/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "op_support.hpp"

namespace spinal {

using detail::ImplPtr;
using detail::make_result;
using detail::shape_fail;

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap view(const detail::TensorImpl& t, std::size_t rows, std::size_t cols) {
  return ConstMap(t.data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MutMap grad_view(detail::TensorImpl& t, std::size_t rows, std::size_t cols) {
  return MutMap(detail::ensure_grad(t).data(), static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(cols));
}

ConstMap view(std::span<const double> d, std::size_t rows, std::size_t cols) {
  return ConstMap(d.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    shape_fail(op, "expected rank " + std::to_string(rank) + ", got " + to_string(t.shape()));
  }
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_fail(op, to_string(a.shape()) + " vs " + to_string(b.shape()));
}

void accumulate(detail::TensorImpl& dst, std::span<const double> g) {
  auto d = detail::ensure_grad(dst);
  for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
}

template <class F>
Tensor unary_elementwise(const Tensor& x, const char* name, F f, detail::BackwardFn bw) {
  std::vector<double> out(x.numel());
  auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result(x.shape(), std::move(out), {x}, name, std::move(bw));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const auto m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) shape_fail("matmul", "inner dimensions differ: " + to_string(a.shape()) + " x " + to_string(b.shape()));
  std::vector<double> out(m * n);
  MutMap(out.data(), m, n).noalias() = view(*a.impl(), m, k) * view(*b.impl(), k, n);
  return make_result({m, n}, std::move(out), {a, b}, "matmul",
                     [m, k, n](std::span<const double> g, std::span<const ImplPtr> in) {
                       auto G = view(g, m, n);
                       if (in[0]->requires_grad) grad_view(*in[0], m, k).noalias() += G * view(*in[1], k, n).transpose();
                       if (in[1]->requires_grad) grad_view(*in[1], k, n).noalias() += view(*in[0], m, k).transpose() * G;
                     });
}

Tensor matmul_transposed(const Tensor& a, const Tensor& b) {
  require_rank("matmul_transposed", a, 2);
  require_rank("matmul_transposed", b, 2);
  const auto m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k) {
    shape_fail("matmul_transposed", "inner dimensions differ: " + to_string(a.shape()) + " x " + to_string(b.shape()) + "^T");
  }
  std::vector<double> out(m * n);
  MutMap(out.data(), m, n).noalias() = view(*a.impl(), m, k) * view(*b.impl(), n, k).transpose();
  return make_result({m, n}, std::move(out), {a, b}, "matmul_transposed",
                     [m, k, n](std::span<const double> g, std::span<const ImplPtr> in) {
                       auto G = view(g, m, n);
                       if (in[0]->requires_grad) grad_view(*in[0], m, k).noalias() += G * view(*in[1], n, k);
                       if (in[1]->requires_grad) grad_view(*in[1], n, k).noalias() += G.transpose() * view(*in[0], m, k);
                     });
}

Tensor transpose(const Tensor& a) {
  require_rank("transpose", a, 2);
  const auto m = a.dim(0), n = a.dim(1);
  std::vector<double> out(m * n);
  MutMap(out.data(), n, m) = view(*a.impl(), m, n).transpose();
  return make_result({n, m}, std::move(out), {a}, "transpose",
                     [m, n](std::span<const double> g, std::span<const ImplPtr> in) {
                       grad_view(*in[0], m, n) += view(g, n, m).transpose();
                     });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return make_result(a.shape(), std::move(out), {a, b}, "add",
                     [](std::span<const double> g, std::span<const ImplPtr> in) {
                       if (in[0]->requires_grad) accumulate(*in[0], g);
                       if (in[1]->requires_grad) accumulate(*in[1], g);
                     });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return make_result(a.shape(), std::move(out), {a, b}, "sub",
                     [](std::span<const double> g, std::span<const ImplPtr> in) {
                       if (in[0]->requires_grad) accumulate(*in[0], g);
                       if (in[1]->requires_grad) {
                         auto d = detail::ensure_grad(*in[1]);
                         for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
                       }
                     });
}

Tensor mul_elementwise(const Tensor& a, const Tensor& b) {
  require_same_shape("mul_elementwise", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_result(a.shape(), std::move(out), {a, b}, "mul_elementwise",
                     [](std::span<const double> g, std::span<const ImplPtr> in) {
                       const auto& av = in[0]->data;
                       const auto& bv = in[1]->data;
                       if (in[0]->requires_grad) {
                         auto d = detail::ensure_grad(*in[0]);
                         for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * bv[i];
                       }
                       if (in[1]->requires_grad) {
                         auto d = detail::ensure_grad(*in[1]);
                         for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * av[i];
                       }
                     });
}

Tensor broadcast_add_bias(const Tensor& a, const Tensor& bias) {
  if (a.rank() == 0 || bias.rank() != 1 || bias.dim(0) != a.shape().back()) {
    shape_fail("broadcast_add_bias", "bias " + to_string(bias.shape()) + " does not match last dim of " + to_string(a.shape()));
  }
  const auto width = bias.dim(0);
  const auto rows = a.numel() / width;
  std::vector<double> out(a.data().begin(), a.data().end());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) out[r * width + c] += bias.data()[c];
  }
  return make_result(a.shape(), std::move(out), {a, bias}, "broadcast_add_bias",
                     [rows, width](std::span<const double> g, std::span<const ImplPtr> in) {
                       if (in[0]->requires_grad) accumulate(*in[0], g);
                       if (in[1]->requires_grad) {
                         auto d = detail::ensure_grad(*in[1]);
                         for (std::size_t r = 0; r < rows; ++r) {
                           for (std::size_t c = 0; c < width; ++c) d[c] += g[r * width + c];
                         }
                       }
                     });
}

Tensor scale(const Tensor& a, double factor) {
  return unary_elementwise(a, "scale", [factor](double v) { return v * factor; },
                           [factor](std::span<const double> g, std::span<const ImplPtr> in) {
                             auto d = detail::ensure_grad(*in[0]);
                             for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * factor;
                           });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return make_result({}, {s}, {a}, "sum", [](std::span<const double> g, std::span<const ImplPtr> in) {
    auto d = detail::ensure_grad(*in[0]);
    for (auto& v : d) v += g[0];
  });
}

Tensor mean(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  const double inv = 1.0 / static_cast<double>(a.numel());
  return make_result({}, {s * inv}, {a}, "mean", [inv](std::span<const double> g, std::span<const ImplPtr> in) {
    auto d = detail::ensure_grad(*in[0]);
    for (auto& v : d) v += g[0] * inv;
  });
}

Tensor relu(const Tensor& x) {
  return unary_elementwise(x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
                           [](std::span<const double> g, std::span<const ImplPtr> in) {
                             const auto& xv = in[0]->data;
                             auto d = detail::ensure_grad(*in[0]);
                             for (std::size_t i = 0; i < g.size(); ++i) {
                               if (xv[i] > 0.0) d[i] += g[i];
                             }
                           });
}

Tensor tanh_act(const Tensor& x) {
  return unary_elementwise(x, "tanh", [](double v) { return std::tanh(v); },
                           [](std::span<const double> g, std::span<const ImplPtr> in) {
                             const auto& xv = in[0]->data;
                             auto d = detail::ensure_grad(*in[0]);
                             for (std::size_t i = 0; i < g.size(); ++i) {
                               const double y = std::tanh(xv[i]);
                               d[i] += g[i] * (1.0 - y * y);
                             }
                           });
}

Tensor identity_act(const Tensor& x) { return x; }

Tensor log_softmax(const Tensor& x) {
  require_rank("log_softmax", x, 2);
  const auto rows = x.dim(0), cols = x.dim(1);
  std::vector<double> out(x.numel());
  auto in = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = in.data() + r * cols;
    const double mx = *std::max_element(row, row + cols);
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += std::exp(row[c] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = row[c] - lse;
  }
  // Keep the forward values for the backward pass: softmax = exp(out).
  auto saved = std::make_shared<std::vector<double>>(out);
  return make_result(x.shape(), std::move(out), {x}, "log_softmax",
                     [rows, cols, saved](std::span<const double> g, std::span<const ImplPtr> in) {
                       auto d = detail::ensure_grad(*in[0]);
                       for (std::size_t r = 0; r < rows; ++r) {
                         double gs = 0.0;
                         for (std::size_t c = 0; c < cols; ++c) gs += g[r * cols + c];
                         for (std::size_t c = 0; c < cols; ++c) {
                           const auto i = r * cols + c;
                           d[i] += g[i] - std::exp((*saved)[i]) * gs;
                         }
                       }
                     });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.numel()) {
    shape_fail("reshape", "cannot view " + to_string(x.shape()) + " as " + to_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result(std::move(shape), std::move(out), {x}, "reshape",
                     [](std::span<const double> g, std::span<const ImplPtr> in) { accumulate(*in[0], g); });
}

Tensor concat_last_dim(std::span<const Tensor> parts) {
  if (parts.empty()) shape_fail("concat_last_dim", "no inputs");
  Shape lead(parts[0].shape());
  if (lead.empty()) shape_fail("concat_last_dim", "scalar input");
  lead.pop_back();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    Shape pl(p.shape());
    if (pl.empty()) shape_fail("concat_last_dim", "scalar input");
    widths.push_back(pl.back());
    total += pl.back();
    pl.pop_back();
    if (pl != lead) {
      shape_fail("concat_last_dim", "leading dims differ: " + to_string(parts[0].shape()) + " vs " + to_string(p.shape()));
    }
  }
  const std::size_t rows = numel(lead);
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto src = parts[p].data();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(src.data() + r * widths[p], widths[p], out.data() + r * total + offset);
    }
    offset += widths[p];
  }
  Shape shape = lead;
  shape.push_back(total);
  return make_result(std::move(shape), std::move(out), parts, "concat_last_dim",
                     [rows, total, widths](std::span<const double> g, std::span<const ImplPtr> in) {
                       std::size_t off = 0;
                       for (std::size_t p = 0; p < in.size(); ++p) {
                         if (in[p]->requires_grad) {
                           auto d = detail::ensure_grad(*in[p]);
                           for (std::size_t r = 0; r < rows; ++r) {
                             for (std::size_t c = 0; c < widths[p]; ++c) d[r * widths[p] + c] += g[r * total + off + c];
                           }
                         }
                         off += widths[p];
                       }
                     });
}

Tensor slice_last_dim(const Tensor& x, std::size_t start, std::size_t length) {
  if (x.rank() == 0) shape_fail("slice_last_dim", "scalar input");
  const auto width = x.shape().back();
  if (length == 0 || start >= width || length > width - start) {
    shape_fail("slice_last_dim", "range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                                     ") outside last dim of " + to_string(x.shape()));
  }
  const auto rows = x.numel() / width;
  std::vector<double> out(rows * length);
  auto src = x.data();
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(src.data() + r * width + start, length, out.data() + r * length);
  Shape shape(x.shape());
  shape.back() = length;
  return make_result(std::move(shape), std::move(out), {x}, "slice_last_dim",
                     [rows, width, start, length](std::span<const double> g, std::span<const ImplPtr> in) {
                       auto d = detail::ensure_grad(*in[0]);
                       for (std::size_t r = 0; r < rows; ++r) {
                         for (std::size_t c = 0; c < length; ++c) d[r * width + start + c] += g[r * length + c];
                       }
                     });
}

Tensor select_per_row(const Tensor& x, std::span<const std::size_t> indices) {
  require_rank("select_per_row", x, 2);
  const auto rows = x.dim(0), cols = x.dim(1);
  if (indices.size() != rows) {
    shape_fail("select_per_row", std::to_string(indices.size()) + " indices for " + to_string(x.shape()));
  }
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (indices[r] >= cols) shape_fail("select_per_row", "index " + std::to_string(indices[r]) + " >= " + std::to_string(cols));
    out[r] = x.data()[r * cols + indices[r]];
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return make_result({rows}, std::move(out), {x}, "select_per_row",
                     [cols, idx = std::move(idx)](std::span<const double> g, std::span<const ImplPtr> in) {
                       auto d = detail::ensure_grad(*in[0]);
                       for (std::size_t r = 0; r < idx.size(); ++r) d[r * cols + idx[r]] += g[r];
                     });
}

}  // namespace spinal
