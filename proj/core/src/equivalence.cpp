#include "spinal/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace spinal {

namespace {

Tensor uniform(Shape shape, Rng& rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = dist(rng);
  return Tensor(std::move(shape), std::move(v));
}

}  // namespace

ShallowNet random_shallow_net(std::size_t input_width, std::size_t hidden_width, std::size_t output_width,
                              Activation act, Rng& rng, double scale) {
  ShallowNet net{uniform({hidden_width, input_width}, rng, scale), uniform({hidden_width}, rng, scale), act,
                 uniform({output_width, hidden_width}, rng, scale), uniform({output_width}, rng, scale)};
  return net;
}

EquivalenceReport run_equivalence(const EquivalenceOptions& options) {
  Rng rng(options.seed);
  EquivalenceReport report;
  NoGradGuard no_grad;
  ForwardContext ctx{Mode::eval, nullptr};
  for (std::size_t t = 0; t < options.trials; ++t) {
    const ShallowNet net = random_shallow_net(options.input_width, options.hidden_width, options.output_width, options.act,
                                              rng, options.zero_weights ? 0.0 : 1.0);
    const SpinalLayer spinal = build_equivalent_spinal(net, options.block_width);
    report.sublayers = spinal.config().num_sublayers;
    const Tensor x = uniform({options.inputs_per_trial, options.input_width}, rng, 1.0);
    const Tensor expected = net.forward(x);
    const Tensor got = spinal.forward(x, ctx);
    for (std::size_t i = 0; i < expected.numel(); ++i) {
      const double diff = std::abs(expected.data()[i] - got.data()[i]);
      report.max_abs_discrepancy =
          std::isnan(diff) ? std::numeric_limits<double>::infinity() : std::max(report.max_abs_discrepancy, diff);
    }
    ++report.trials;
    report.evaluations += options.inputs_per_trial;
  }
  return report;
}

}  // namespace spinal
