#include <cmath>
#include <random>

#include "spinal/data.hpp"
#include "spinal/errors.hpp"
#include "spinal/seed.hpp"

namespace spinal {

std::string_view to_string(RegressionTarget t) {
  switch (t) {
    case RegressionTarget::sum:
      return "sum";
    case RegressionTarget::sin_sum:
      return "sin_sum";
    case RegressionTarget::prod:
      return "prod";
    case RegressionTarget::sin_prod:
      return "sin_prod";
  }
  return "?";
}

RegressionTarget parse_regression_target(std::string_view name) {
  if (name == "sum") return RegressionTarget::sum;
  if (name == "sin_sum") return RegressionTarget::sin_sum;
  if (name == "prod") return RegressionTarget::prod;
  if (name == "sin_prod") return RegressionTarget::sin_prod;
  throw ConfigError("unknown regression target '" + std::string(name) + "' (sum, sin_sum, prod, sin_prod)");
}

double regression_target(RegressionTarget t, std::span<const double> x) {
  double s = 0.0;
  double p = 1.0;
  for (double v : x) {
    s += v;
    p *= v;
  }
  switch (t) {
    case RegressionTarget::sum:
      return s;
    case RegressionTarget::sin_sum:
      return std::sin(s);
    case RegressionTarget::prod:
      return p;
    case RegressionTarget::sin_prod:
      return std::sin(p);
  }
  return 0.0;
}

namespace {

Dataset generate(const RegressionSpec& spec, std::size_t n, Split split, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  std::vector<double> x(n * spec.num_vars);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> row(x.data() + i * spec.num_vars, spec.num_vars);
    for (auto& v : row) v = uniform(rng);
    y[i] = regression_target(spec.target, row);
    if (spec.noise_sigma > 0.0) y[i] += noise(rng);
  }
  return Dataset{Tensor({n, spec.num_vars}, std::move(x)), Tensor({n, 1}, std::move(y)), split, 0};
}

}  // namespace

RegressionData gen_regression(const RegressionSpec& spec) {
  if (spec.num_vars == 0 || spec.train_samples == 0 || spec.test_samples == 0) {
    throw ConfigError("regression: variable and sample counts must be positive");
  }
  if (spec.noise_sigma < 0.0) throw ConfigError("regression: noise_sigma must be >= 0");
  return {generate(spec, spec.train_samples, Split::train, derive_seed(spec.seed, SeedStream::data_train)),
          generate(spec, spec.test_samples, Split::test, derive_seed(spec.seed, SeedStream::data_test))};
}

}  // namespace spinal
