#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <string_view>
#include <vector>

#include "spinal/tensor.hpp"

namespace spinal {

enum class Split { train, test };

/// Inputs with either class ids (num_classes > 0, targets [N]) or regression
/// targets (num_classes == 0, targets [N x 1]).
struct Dataset {
  Tensor inputs;
  Tensor targets;
  Split split = Split::train;
  std::size_t num_classes = 0;

  std::size_t size() const { return inputs.dim(0); }
  bool is_classification() const { return num_classes > 0; }
  /// Class id of sample i; only for classification sets.
  std::size_t label(std::size_t i) const;
  /// The first n samples (or all of them when n == 0 or n >= size()).
  Dataset head(std::size_t n) const;
  /// Throws ShapeError/ConfigError on a broken invariant.
  void validate() const;
};

// --- IDX ------------------------------------------------------------------

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major
};

/// Gzip-compressed files are detected and inflated transparently. Errors are
/// ParseError with the file path in the message.
IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);
void write_idx_images(const std::filesystem::path& path, const IdxImages& images);
void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels);

/// N x 1 x rows x cols pixels scaled by 1/255, labels as class ids.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path, Split split,
                 std::size_t num_classes = 10);

/// Standard MNIST file names inside dir (plain or .gz).
struct IdxPaths {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};
IdxPaths mnist_paths(const std::filesystem::path& dir);

/// Per-pixel (x - mean) / stddev using statistics of `reference`.
void standardize(Dataset& data, double mean, double stddev);
std::pair<double, double> pixel_mean_std(const Dataset& data);

// --- synthetic regression -------------------------------------------------

enum class RegressionTarget { sum, sin_sum, prod, sin_prod };

std::string_view to_string(RegressionTarget t);
RegressionTarget parse_regression_target(std::string_view name);
double regression_target(RegressionTarget t, std::span<const double> x);

/// Inputs uniform on [-1, 1]^num_vars; targets f(x) + N(0, noise_sigma^2).
struct RegressionSpec {
  std::size_t num_vars = 8;
  RegressionTarget target = RegressionTarget::sum;
  double noise_sigma = 0.2;
  std::size_t train_samples = 1000;
  std::size_t test_samples = 1000;
  std::uint64_t seed = 0;
};

struct RegressionData {
  Dataset train;
  Dataset test;
};

/// Pure function of `spec`.
RegressionData gen_regression(const RegressionSpec& spec);

// --- batching -------------------------------------------------------------

struct Batch {
  Tensor inputs;
  Tensor targets;
  std::vector<std::size_t> indices;
};

/// Index plan for one epoch: full cover, last partial batch kept, optional
/// seeded shuffle. batch_size 0 means one full batch.
std::vector<std::vector<std::size_t>> batch_plan(std::size_t n, std::size_t batch_size, bool shuffle, std::uint64_t seed);

/// Gathers the given samples into a batch.
Batch gather_batch(const Dataset& data, std::span<const std::size_t> indices);

/// Range over the batches of one epoch, materialized lazily.
class Batches {
 public:
  Batches(const Dataset& data, std::size_t batch_size, bool shuffle, std::uint64_t seed);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Batch;
    using difference_type = std::ptrdiff_t;

    iterator(const Batches* owner, std::size_t pos) : owner_(owner), pos_(pos) {}
    Batch operator*() const { return gather_batch(*owner_->data_, owner_->plan_[pos_]); }
    iterator& operator++() {
      ++pos_;
      return *this;
    }
    bool operator==(const iterator& o) const { return pos_ == o.pos_; }

   private:
    const Batches* owner_;
    std::size_t pos_;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, plan_.size()}; }
  std::size_t size() const { return plan_.size(); }
  const std::vector<std::vector<std::size_t>>& plan() const { return plan_; }

 private:
  const Dataset* data_;
  std::vector<std::vector<std::size_t>> plan_;
};

Batches batches(const Dataset& data, std::size_t batch_size, bool shuffle, std::uint64_t seed);

}  // namespace spinal
