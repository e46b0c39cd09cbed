#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "spinal/experiment.hpp"

namespace spinal {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReproduceOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  /// 0 picks the table's own epoch count (200 regression, 8 MNIST).
  std::size_t epochs = 0;
  std::filesystem::path data_dir;
  /// MNIST training subset; 0 uses all 60,000 images.
  std::size_t train_limit = 0;
  /// Structural checks only.
  bool counts_only = false;
  std::size_t threads = 1;
  /// Progress lines; may be null.
  std::ostream* log = nullptr;
};

struct ReproduceReport {
  std::string table;
  std::vector<CheckResult> checks;
  std::vector<ExperimentResult> runs;
  bool passed() const;
  /// Human-readable table of published vs measured values and check lines.
  void print(std::ostream& out) const;
};

/// Structural counts for the regression models.
std::vector<CheckResult> regression_count_checks();
/// Structural counts for the MNIST models.
std::vector<CheckResult> mnist_count_checks();

/// Both regression models on all four targets.
ReproduceReport reproduce_t1(const ReproduceOptions& options);
/// Baseline CNN and the width-8 spinal CNN on MNIST.
ReproduceReport reproduce_t2_mnist(const ReproduceOptions& options);
/// Dispatches on "t1" or "t2-mnist"; anything else is a ConfigError.
ReproduceReport reproduce(std::string_view table, const ReproduceOptions& options);

}  // namespace spinal
