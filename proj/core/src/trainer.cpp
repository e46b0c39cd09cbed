#include <chrono>
#include <cmath>
#include <limits>

#include "spinal/autograd.hpp"
#include "spinal/errors.hpp"
#include "spinal/seed.hpp"
#include "spinal/train.hpp"

namespace spinal {

Task task_of(const Dataset& data) { return data.is_classification() ? Task::classification : Task::regression; }

double evaluate(const Sequential& model, const Dataset& data, std::size_t batch_size) {
  NoGradGuard no_grad;
  ForwardContext ctx{Mode::eval, nullptr};
  const bool classify = data.is_classification();
  double squared = 0.0;
  std::size_t correct = 0;
  std::size_t elements = 0;
  for (const auto& batch : batches(data, batch_size, false, 0)) {
    const Tensor out = model.forward(batch.inputs, ctx);
    if (classify) {
      if (out.rank() != 2) throw ShapeError("evaluate: classifier output must be n x classes, got " + to_string(out.shape()));
      const auto classes = out.dim(1);
      auto o = out.data();
      for (std::size_t r = 0; r < out.dim(0); ++r) {
        std::size_t arg = 0;
        for (std::size_t c = 1; c < classes; ++c) {
          if (o[r * classes + c] > o[r * classes + arg]) arg = c;
        }
        if (arg == static_cast<std::size_t>(batch.targets.data()[r])) ++correct;
      }
    } else {
      if (out.shape() != batch.targets.shape()) {
        throw ShapeError("evaluate: output " + to_string(out.shape()) + " vs target " + to_string(batch.targets.shape()));
      }
      for (std::size_t i = 0; i < out.numel(); ++i) {
        const double d = out.data()[i] - batch.targets.data()[i];
        squared += d * d;
      }
      elements += out.numel();
    }
  }
  return classify ? static_cast<double>(correct) / static_cast<double>(data.size())
                  : squared / static_cast<double>(elements);
}

std::vector<MetricsRecord> fit(const Sequential& model, const Dataset& train, const Dataset& test, Optimizer& optimizer,
                               const FitOptions& options) {
  std::vector<MetricsRecord> records;
  if (options.epochs == 0) return records;
  const Task task = task_of(train);
  if (task_of(test) != task) throw ConfigError("fit: train and test sets disagree on task");

  Rng dropout_rng(derive_seed(options.seed, SeedStream::dropout));
  double best = task == Task::regression ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto plan = batch_plan(train.size(), options.batch_size, options.shuffle,
                                 derive_seed(options.seed, SeedStream::shuffle, epoch));
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t b = 0; b < plan.size(); ++b) {
      const Batch batch = gather_batch(train, plan[b]);
      ForwardContext ctx{Mode::train, &dropout_rng};
      const Tensor out = model.forward(batch.inputs, ctx);
      const Tensor loss = task == Task::regression ? mse_loss(out, batch.targets) : nll_loss(out, batch.targets);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("fit: non-finite loss " + std::to_string(value) + " at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(b));
      }
      backward(loss);
      optimizer.step();
      loss_sum += value * static_cast<double>(plan[b].size());
      seen += plan[b].size();
    }

    MetricsRecord rec;
    rec.epoch = epoch;
    rec.seed = options.seed;
    rec.train_loss = loss_sum / static_cast<double>(seen);
    if (options.eval_each_epoch || epoch == options.epochs) {
      rec.eval_metric = evaluate(model, test, options.eval_batch_size);
      best = task == Task::regression ? std::min(best, rec.eval_metric) : std::max(best, rec.eval_metric);
    } else {
      rec.eval_metric = std::numeric_limits<double>::quiet_NaN();
    }
    rec.best_so_far = best;
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
  }
  return records;
}

}  // namespace spinal
