#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "spinal/data.hpp"
#include "spinal/errors.hpp"

namespace spinal {

namespace {

Tensor take_rows(const Tensor& t, std::span<const std::size_t> rows) {
  const std::size_t width = t.numel() / t.dim(0);
  std::vector<double> out(rows.size() * width);
  auto src = t.data();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(src.data() + rows[i] * width, width, out.data() + i * width);
  }
  Shape shape(t.shape());
  shape[0] = rows.size();
  return Tensor(std::move(shape), std::move(out));
}

}  // namespace

std::size_t Dataset::label(std::size_t i) const {
  if (!is_classification()) throw ContractError("label: dataset has regression targets");
  return static_cast<std::size_t>(targets.data()[i]);
}

Dataset Dataset::head(std::size_t n) const {
  if (n == 0 || n >= size()) return *this;
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return Dataset{take_rows(inputs, rows), take_rows(targets, rows), split, num_classes};
}

void Dataset::validate() const {
  if (inputs.rank() < 2) throw ShapeError("dataset: inputs must be N x features");
  if (targets.dim(0) != inputs.dim(0)) {
    throw ShapeError("dataset: " + std::to_string(targets.dim(0)) + " targets for " + std::to_string(inputs.dim(0)) + " inputs");
  }
  if (is_classification()) {
    if (targets.rank() != 1) throw ShapeError("dataset: class targets must be 1-d");
    for (double t : targets.data()) {
      if (t < 0 || t >= static_cast<double>(num_classes) || t != std::floor(t)) {
        throw ConfigError("dataset: class id " + std::to_string(t) + " out of range");
      }
    }
  } else if (targets.shape() != Shape{inputs.dim(0), 1}) {
    throw ShapeError("dataset: regression targets must be N x 1");
  }
}

std::pair<double, double> pixel_mean_std(const Dataset& data) {
  const auto x = data.inputs.data();
  double s = 0.0;
  for (double v : x) s += v;
  const double mean = s / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(x.size()))};
}

void standardize(Dataset& data, double mean, double stddev) {
  if (!(stddev > 0.0)) throw ConfigError("standardize: stddev must be positive");
  for (auto& v : data.inputs.mutable_data()) v = (v - mean) / stddev;
}

std::vector<std::vector<std::size_t>> batch_plan(std::size_t n, std::size_t batch_size, bool shuffle, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  const std::size_t step = batch_size == 0 ? std::max<std::size_t>(n, 1) : batch_size;
  std::vector<std::vector<std::size_t>> plan;
  for (std::size_t start = 0; start < n; start += step) {
    const auto end = std::min(n, start + step);
    plan.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return plan;
}

Batch gather_batch(const Dataset& data, std::span<const std::size_t> indices) {
  return Batch{take_rows(data.inputs, indices), take_rows(data.targets, indices), {indices.begin(), indices.end()}};
}

Batches::Batches(const Dataset& data, std::size_t batch_size, bool shuffle, std::uint64_t seed)
    : data_(&data), plan_(batch_plan(data.size(), batch_size, shuffle, seed)) {}

Batches batches(const Dataset& data, std::size_t batch_size, bool shuffle, std::uint64_t seed) {
  return Batches(data, batch_size, shuffle, seed);
}

}  // namespace spinal
