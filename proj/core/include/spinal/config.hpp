#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinal/data.hpp"
#include "spinal/model_spec.hpp"
#include "spinal/train.hpp"

namespace spinal {

struct DatasetConfig {
  enum class Kind { regression, idx };
  Kind kind = Kind::regression;

  // regression; the generator seed comes from each run's root seed
  RegressionSpec regression;

  // idx; file names are resolved against data_dir when relative
  std::filesystem::path data_dir;
  std::string train_images = "train-images-idx3-ubyte";
  std::string train_labels = "train-labels-idx1-ubyte";
  std::string test_images = "t10k-images-idx3-ubyte";
  std::string test_labels = "t10k-labels-idx1-ubyte";
  std::size_t num_classes = 10;
  /// Keep only the first n training samples; 0 keeps all.
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
  /// Shift and scale pixels by the training-set mean and deviation.
  bool standardize = false;

  /// data_dir / name, or name when absolute. Falls back to name + ".gz".
  std::filesystem::path resolve(const std::string& name) const;
};

/// One experiment: a model, a dataset, an optimizer, and a set of seeds.
///
/// File grammar (INI-like; `#` starts a comment):
///
///     [experiment]  name, epochs, batch_size (0 = full batch), seeds (comma
///                   list), checkpoints (comma list), threads (0 = all cores)
///     [model]       ModelSpec descriptor lines
///     [dataset]     kind = regression | idx, then
///                   regression: target, num_vars, noise_sigma, train_samples, test_samples
///                   idx: data_dir, train_images, train_labels, test_images,
///                        test_labels, num_classes, train_limit, test_limit, standardize
///     [optimizer]   kind = sgd | adam, lr, momentum, beta1, beta2, eps
///     [output]      csv, summary (paths; empty csv means stdout)
///
/// Omitted keys take documented defaults; to_text() writes every key back out.
struct ExperimentConfig {
  std::string name = "experiment";
  ModelSpec model;
  DatasetConfig dataset;
  OptimizerConfig optimizer;
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::size_t> checkpoints;
  std::size_t threads = 1;
  std::string csv_path;
  std::string summary_path;

  /// default_data_dir applies when the dataset section sets no data_dir.
  /// Throws ConfigError (or SpecError for the model section).
  static ExperimentConfig parse(std::string_view text, const std::filesystem::path& default_data_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path, const std::filesystem::path& default_data_dir = {});

  /// Fully resolved config in the same grammar.
  std::string to_text() const;
  nlohmann::json to_json() const;

  Task task() const { return dataset.kind == DatasetConfig::Kind::idx ? Task::classification : Task::regression; }
};

/// Regression: 100 and 200 where reached, plus the final epoch.
/// Classification: the final epoch.
std::vector<std::size_t> default_checkpoints(Task task, std::size_t epochs);

/// SPINAL_DATA_DIR, or empty.
std::filesystem::path data_dir_from_env();

}  // namespace spinal
