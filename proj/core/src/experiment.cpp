#include "spinal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "spinal/errors.hpp"
#include "spinal/seed.hpp"

namespace spinal {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

DatasetPair DataCache::get(const DatasetConfig& config, std::uint64_t seed) {
  if (config.kind == DatasetConfig::Kind::regression) {
    RegressionSpec spec = config.regression;
    spec.seed = seed;
    auto data = gen_regression(spec);
    return {std::make_shared<const Dataset>(std::move(data.train)), std::make_shared<const Dataset>(std::move(data.test))};
  }

  const auto train_images = config.resolve(config.train_images);
  const auto train_labels = config.resolve(config.train_labels);
  const auto test_images = config.resolve(config.test_images);
  const auto test_labels = config.resolve(config.test_labels);
  const std::string key = train_images.string() + '|' + train_labels.string() + '|' + test_images.string() + '|' +
                          test_labels.string() + '|' + std::to_string(config.num_classes) + '|' +
                          std::to_string(config.train_limit) + '|' + std::to_string(config.test_limit) + '|' +
                          (config.standardize ? "s" : "r");

  std::lock_guard lock(mutex_);
  if (auto it = idx_.find(key); it != idx_.end()) return it->second;

  Dataset train = load_idx(train_images, train_labels, Split::train, config.num_classes).head(config.train_limit);
  Dataset test = load_idx(test_images, test_labels, Split::test, config.num_classes).head(config.test_limit);
  if (config.standardize) {
    const auto [mean, stddev] = pixel_mean_std(train);
    standardize(train, mean, stddev);
    standardize(test, mean, stddev);
  }
  DatasetPair pair{std::make_shared<const Dataset>(std::move(train)), std::make_shared<const Dataset>(std::move(test))};
  idx_.emplace(key, pair);
  return pair;
}

namespace {

SeedRun run_seed(const ExperimentConfig& config, DataCache& cache, std::uint64_t seed) {
  const auto data = cache.get(config.dataset, seed);
  Rng init_rng(derive_seed(seed, SeedStream::init));
  const Sequential model = build_model(config.model, init_rng);
  Optimizer optimizer(model.parameters(), config.optimizer);

  FitOptions options;
  options.epochs = config.epochs;
  options.batch_size = config.batch_size;
  options.seed = seed;

  SeedRun run;
  run.seed = seed;
  run.registered_params = optimizer.parameter_count();
  const auto start = std::chrono::steady_clock::now();
  run.metrics = fit(model, *data.train, *data.test, optimizer, options);
  run.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, DataCache& cache) {
  if (config.epochs == 0) throw ConfigError("run_experiment: epochs must be positive");
  ExperimentResult result{config, analyze_cost(config.model), {}};
  result.runs.resize(config.seeds.size());

  std::size_t workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  workers = std::min(workers, config.seeds.size());

  if (workers <= 1) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) result.runs[i] = run_seed(config, cache, config.seeds[i]);
    return result;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(config.seeds.size());
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
        try {
          result.runs[i] = run_seed(config, cache, config.seeds[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  DataCache cache;
  return run_experiment(config, cache);
}

void write_metrics_csv(std::ostream& out, const ExperimentResult& result) {
  out << kMetricsCsvHeader << '\n';
  for (const auto& run : result.runs) {
    for (const auto& m : run.metrics) {
      out << run.seed << ',' << m.epoch << ',' << format_number(m.train_loss) << ',' << format_number(m.eval_metric) << ','
          << format_number(m.best_so_far) << '\n';
    }
  }
}

CheckpointStats checkpoint_stats(const ExperimentResult& result, std::size_t epoch) {
  CheckpointStats stats;
  stats.epoch = epoch;
  for (const auto& run : result.runs) {
    if (epoch == 0 || epoch > run.metrics.size()) {
      throw ConfigError("checkpoint_stats: epoch " + std::to_string(epoch) + " not reached by seed " +
                        std::to_string(run.seed));
    }
    stats.per_seed.push_back(run.metrics[epoch - 1].best_so_far);
  }
  if (stats.per_seed.empty()) throw ConfigError("checkpoint_stats: no runs");
  stats.min = *std::min_element(stats.per_seed.begin(), stats.per_seed.end());
  stats.max = *std::max_element(stats.per_seed.begin(), stats.per_seed.end());
  double total = 0.0;
  for (double v : stats.per_seed) total += v;
  stats.mean = total / static_cast<double>(stats.per_seed.size());
  return stats;
}

const std::vector<std::string>& summary_keys() {
  static const std::vector<std::string> keys{"name", "task", "metric", "config", "cost", "seeds", "checkpoints", "wall_time_s"};
  return keys;
}

nlohmann::json summarize(const ExperimentResult& result) {
  const bool classify = result.config.task() == Task::classification;
  nlohmann::json seeds = nlohmann::json::array();
  double wall = 0.0;
  for (const auto& run : result.runs) {
    const auto& last = run.metrics.back();
    seeds.push_back({{"seed", run.seed},
                     {"final_eval_metric", last.eval_metric},
                     {"best_so_far", last.best_so_far},
                     {"final_train_loss", last.train_loss},
                     {"registered_params", run.registered_params},
                     {"wall_time_s", run.wall_time_s}});
    wall += run.wall_time_s;
  }
  nlohmann::json checkpoints = nlohmann::json::array();
  for (auto epoch : result.config.checkpoints) {
    const auto s = checkpoint_stats(result, epoch);
    checkpoints.push_back({{"epoch", s.epoch}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"per_seed", s.per_seed}});
  }
  return {{"name", result.config.name},
          {"task", classify ? "classification" : "regression"},
          {"metric", classify ? "test_accuracy" : "test_mse"},
          {"config", result.config.to_json()},
          {"cost", result.cost.to_json()},
          {"seeds", seeds},
          {"checkpoints", checkpoints},
          {"wall_time_s", wall}};
}

}  // namespace spinal
