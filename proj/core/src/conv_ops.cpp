#include <Eigen/Core>
#include <algorithm>

#include "op_support.hpp"
#include "spinal/ops.hpp"

namespace spinal {

using detail::ImplPtr;
using detail::make_result;
using detail::shape_fail;

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ConvGeometry {
  std::size_t n, c, h, w, o, k, oh, ow;
  std::size_t patch() const { return c * k * k; }
  std::size_t positions() const { return oh * ow; }
};

// cols[(ci*k + ki)*k + kj][s*P + y*ow + x] = x[s, ci, y+ki, x+kj]
void im2col(const ConvGeometry& g, const double* x, RowMat& cols) {
  const std::size_t P = g.positions();
  cols.resize(static_cast<Eigen::Index>(g.patch()), static_cast<Eigen::Index>(g.n * P));
  for (std::size_t ci = 0; ci < g.c; ++ci) {
    for (std::size_t ki = 0; ki < g.k; ++ki) {
      for (std::size_t kj = 0; kj < g.k; ++kj) {
        double* row = cols.data() + ((ci * g.k + ki) * g.k + kj) * g.n * P;
        for (std::size_t s = 0; s < g.n; ++s) {
          const double* plane = x + (s * g.c + ci) * g.h * g.w;
          for (std::size_t y = 0; y < g.oh; ++y) {
            const double* src = plane + (y + ki) * g.w + kj;
            std::copy_n(src, g.ow, row + s * P + y * g.ow);
          }
        }
      }
    }
  }
}

void col2im_accumulate(const ConvGeometry& g, const RowMat& cols, double* dx) {
  const std::size_t P = g.positions();
  for (std::size_t ci = 0; ci < g.c; ++ci) {
    for (std::size_t ki = 0; ki < g.k; ++ki) {
      for (std::size_t kj = 0; kj < g.k; ++kj) {
        const double* row = cols.data() + ((ci * g.k + ki) * g.k + kj) * g.n * P;
        for (std::size_t s = 0; s < g.n; ++s) {
          double* plane = dx + (s * g.c + ci) * g.h * g.w;
          for (std::size_t y = 0; y < g.oh; ++y) {
            double* dst = plane + (y + ki) * g.w + kj;
            const double* src = row + s * P + y * g.ow;
            for (std::size_t x = 0; x < g.ow; ++x) dst[x] += src[x];
          }
        }
      }
    }
  }
}

// Per-thread scratch matrices; conv buffers run to megabytes per batch.
struct Scratch {
  RowMat cols, product, dy;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (x.rank() != 4) shape_fail("conv2d", "input must be n x c x h x w, got " + to_string(x.shape()));
  if (weight.rank() != 4 || weight.dim(2) != weight.dim(3)) {
    shape_fail("conv2d", "weight must be o x c x k x k, got " + to_string(weight.shape()));
  }
  ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), weight.dim(0), weight.dim(2), 0, 0};
  if (weight.dim(1) != g.c) {
    shape_fail("conv2d", "input channels " + std::to_string(g.c) + " but weight " + to_string(weight.shape()));
  }
  if (bias.rank() != 1 || bias.dim(0) != g.o) {
    shape_fail("conv2d", "bias " + to_string(bias.shape()) + " for " + std::to_string(g.o) + " output channels");
  }
  if (g.h < g.k || g.w < g.k) {
    shape_fail("conv2d", "input " + to_string(x.shape()) + " smaller than kernel " + std::to_string(g.k));
  }
  g.oh = g.h - g.k + 1;
  g.ow = g.w - g.k + 1;
  const std::size_t P = g.positions();

  auto& sc = scratch();
  im2col(g, x.data().data(), sc.cols);
  Eigen::Map<const RowMat> wmat(weight.data().data(), static_cast<Eigen::Index>(g.o),
                                static_cast<Eigen::Index>(g.patch()));
  RowMat& ymat = sc.product;
  ymat.noalias() = wmat * sc.cols;  // o x (n*P)

  std::vector<double> out(g.n * g.o * P);
  for (std::size_t s = 0; s < g.n; ++s) {
    for (std::size_t oc = 0; oc < g.o; ++oc) {
      const double b = bias.data()[oc];
      const double* src = ymat.data() + oc * g.n * P + s * P;
      double* dst = out.data() + (s * g.o + oc) * P;
      for (std::size_t p = 0; p < P; ++p) dst[p] = src[p] + b;
    }
  }

  return make_result({g.n, g.o, g.oh, g.ow}, std::move(out), {x, weight, bias}, "conv2d",
                     [g](std::span<const double> grad, std::span<const ImplPtr> in) {
                       const std::size_t P = g.positions();
                       auto& sc = scratch();
                       RowMat& dy = sc.dy;
                       dy.resize(static_cast<Eigen::Index>(g.o), static_cast<Eigen::Index>(g.n * P));
                       for (std::size_t s = 0; s < g.n; ++s) {
                         for (std::size_t oc = 0; oc < g.o; ++oc) {
                           std::copy_n(grad.data() + (s * g.o + oc) * P, P, dy.data() + oc * g.n * P + s * P);
                         }
                       }
                       if (in[2]->requires_grad) {
                         auto db = detail::ensure_grad(*in[2]);
                         for (std::size_t oc = 0; oc < g.o; ++oc) db[oc] += dy.row(static_cast<Eigen::Index>(oc)).sum();
                       }
                       const bool need_w = in[1]->requires_grad;
                       const bool need_x = in[0]->requires_grad;
                       if (need_w) {
                         RowMat& cols = sc.cols;
                         im2col(g, in[0]->data.data(), cols);
                         Eigen::Map<RowMat> dw(detail::ensure_grad(*in[1]).data(), static_cast<Eigen::Index>(g.o),
                                               static_cast<Eigen::Index>(g.patch()));
                         dw.noalias() += dy * cols.transpose();
                       }
                       if (need_x) {
                         Eigen::Map<const RowMat> wmat(in[1]->data.data(), static_cast<Eigen::Index>(g.o),
                                                       static_cast<Eigen::Index>(g.patch()));
                         RowMat& dcols = sc.product;
                         dcols.noalias() = wmat.transpose() * dy;
                         col2im_accumulate(g, dcols, detail::ensure_grad(*in[0]).data());
                       }
                     });
}

Tensor maxpool2d(const Tensor& x) {
  if (x.rank() != 4) shape_fail("maxpool2d", "input must be n x c x h x w, got " + to_string(x.shape()));
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (h % 2 != 0 || w % 2 != 0) shape_fail("maxpool2d", "spatial dims must be even, got " + to_string(x.shape()));
  const auto oh = h / 2, ow = w / 2;
  std::vector<double> out(n * c * oh * ow);
  std::vector<std::size_t> argmax(out.size());
  auto in = x.data();
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    const double* src = in.data() + plane * h * w;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t xx = 0; xx < ow; ++xx) {
        std::size_t best = (2 * y) * w + 2 * xx;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (2 * y + dy) * w + 2 * xx + dx;
            if (src[idx] > src[best]) best = idx;
          }
        }
        const std::size_t o = (plane * oh + y) * ow + xx;
        out[o] = src[best];
        argmax[o] = plane * h * w + best;
      }
    }
  }
  return make_result({n, c, oh, ow}, std::move(out), {x}, "maxpool2d",
                     [argmax = std::move(argmax)](std::span<const double> g, std::span<const ImplPtr> in) {
                       auto d = detail::ensure_grad(*in[0]);
                       for (std::size_t i = 0; i < g.size(); ++i) d[argmax[i]] += g[i];
                     });
}

}  // namespace spinal
