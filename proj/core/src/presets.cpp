#include "spinal/presets.hpp"

namespace spinal {

namespace {

void add_conv_stack(ModelSpec& spec, double conv_dropout) {
  spec.input_shape = {1, 28, 28};
  spec.layers.emplace_back(Conv2dDesc{1, 10, 5});
  spec.layers.emplace_back(MaxPool2dDesc{});
  spec.layers.emplace_back(ActivationDesc{Activation::relu});
  spec.layers.emplace_back(Conv2dDesc{10, 20, 5});
  if (conv_dropout > 0.0) spec.layers.emplace_back(DropoutDesc{conv_dropout});
  spec.layers.emplace_back(MaxPool2dDesc{});
  spec.layers.emplace_back(ActivationDesc{Activation::relu});
  spec.layers.emplace_back(FlattenDesc{});
}

}  // namespace

ModelSpec regression_baseline_spec(std::size_t num_vars) {
  ModelSpec spec;
  spec.input_shape = {num_vars};
  spec.layers.emplace_back(LinearDesc{num_vars, 200, Activation::relu});
  spec.layers.emplace_back(LinearDesc{200, 100, Activation::relu});
  spec.layers.emplace_back(LinearDesc{100, 1, Activation::identity});
  return spec;
}

ModelSpec regression_spinal_spec(std::size_t num_vars) {
  ModelSpec spec;
  spec.input_shape = {num_vars};
  SpinalConfig cfg;
  cfg.input_width = num_vars;
  cfg.num_sublayers = 6;
  cfg.sublayer_width = 50;
  cfg.num_segments = 2;
  cfg.output_width = 1;
  spec.layers.emplace_back(SpinalDesc{cfg});
  return spec;
}

ModelSpec mnist_cnn_spec(double conv_dropout) {
  ModelSpec spec;
  add_conv_stack(spec, conv_dropout);
  spec.layers.emplace_back(LinearDesc{320, 50, Activation::relu});
  spec.layers.emplace_back(LinearDesc{50, 10, Activation::identity});
  spec.layers.emplace_back(LogSoftmaxDesc{});
  return spec;
}

ModelSpec mnist_spinal_cnn_spec(std::size_t width, double conv_dropout) {
  ModelSpec spec;
  add_conv_stack(spec, conv_dropout);
  SpinalConfig cfg;
  cfg.input_width = 320;
  cfg.num_sublayers = 6;
  cfg.sublayer_width = width;
  cfg.num_segments = 2;
  cfg.output_width = 10;
  spec.layers.emplace_back(SpinalDesc{cfg});
  spec.layers.emplace_back(LogSoftmaxDesc{});
  return spec;
}

ExperimentConfig regression_experiment(const ModelSpec& model, RegressionTarget target, std::size_t epochs,
                                       std::vector<std::uint64_t> seeds) {
  ExperimentConfig cfg;
  cfg.name = std::string("regression-") + std::string(to_string(target));
  cfg.model = model;
  cfg.dataset.kind = DatasetConfig::Kind::regression;
  cfg.dataset.regression.num_vars = model.input_shape.at(0);
  cfg.dataset.regression.target = target;
  cfg.optimizer = OptimizerConfig{OptimizerKind::adam, 0.01, 0.0};
  cfg.epochs = epochs;
  cfg.batch_size = 0;
  cfg.seeds = std::move(seeds);
  cfg.checkpoints = default_checkpoints(Task::regression, epochs);
  return cfg;
}

ExperimentConfig mnist_experiment(const ModelSpec& model, const std::filesystem::path& data_dir, std::size_t epochs,
                                  std::vector<std::uint64_t> seeds, std::size_t train_limit) {
  ExperimentConfig cfg;
  cfg.name = "mnist";
  cfg.model = model;
  cfg.dataset.kind = DatasetConfig::Kind::idx;
  cfg.dataset.data_dir = data_dir;
  cfg.dataset.train_limit = train_limit;
  cfg.optimizer = OptimizerConfig{OptimizerKind::sgd, 0.05, 0.5};
  cfg.epochs = epochs;
  cfg.batch_size = 64;
  cfg.seeds = std::move(seeds);
  cfg.checkpoints = default_checkpoints(Task::classification, epochs);
  return cfg;
}

}  // namespace spinal
