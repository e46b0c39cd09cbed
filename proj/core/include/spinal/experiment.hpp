#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinal/config.hpp"
#include "spinal/cost.hpp"
#include "spinal/train.hpp"

namespace spinal {

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> metrics;
  double wall_time_s = 0.0;
  std::size_t registered_params = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  CostReport cost;
  std::vector<SeedRun> runs;  // in config.seeds order
};

struct DatasetPair {
  std::shared_ptr<const Dataset> train;
  std::shared_ptr<const Dataset> test;
};

/// Loads IDX datasets once per (paths, limits, standardize) and hands out
/// shared immutable copies. Regression data is generated per seed, uncached.
class DataCache {
 public:
  DatasetPair get(const DatasetConfig& config, std::uint64_t seed);

 private:
  std::mutex mutex_;
  std::map<std::string, DatasetPair> idx_;
};

/// Trains one fresh model per seed. Seeds run on up to config.threads worker
/// threads; each run owns its model.
ExperimentResult run_experiment(const ExperimentConfig& config, DataCache& cache);
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Header `seed,epoch,train_loss,eval_metric,best_so_far`, one row per (seed,
/// epoch). Numbers use the shortest round-trip form, so equal runs give equal
/// bytes.
void write_metrics_csv(std::ostream& out, const ExperimentResult& result);
inline constexpr const char* kMetricsCsvHeader = "seed,epoch,train_loss,eval_metric,best_so_far";

/// Keys: name, task, metric, config, cost, seeds, checkpoints, wall_time_s.
/// Each checkpoint holds epoch, mean, min, max, per_seed of best_so_far.
nlohmann::json summarize(const ExperimentResult& result);
const std::vector<std::string>& summary_keys();

struct CheckpointStats {
  std::size_t epoch = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> per_seed;
};
CheckpointStats checkpoint_stats(const ExperimentResult& result, std::size_t epoch);

std::string format_number(double v);

}  // namespace spinal
