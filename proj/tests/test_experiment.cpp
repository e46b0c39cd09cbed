#include <gtest/gtest.h>

#include <sstream>

#include "spinal/config.hpp"
#include "spinal/errors.hpp"
#include "spinal/experiment.hpp"
#include "spinal/presets.hpp"
#include "spinal/reference_values.hpp"
#include "spinal/reproduce.hpp"

using namespace spinal;

namespace {

const char* kTinyRegression = R"(
[experiment]
name = tiny
epochs = 4
seeds = 3, 1

[model]
input 8
spinal in=8 layers=4 width=5 segments=2 out=1

[dataset]
kind = regression
target = sin_sum
train_samples = 64
test_samples = 32

[optimizer]
kind = adam
lr = 0.01
)";

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_metrics_csv(os, r);
  return os.str();
}

}  // namespace

TEST(Config, ParsesAndMaterializesDefaults) {
  auto cfg = ExperimentConfig::parse(kTinyRegression);
  EXPECT_EQ(cfg.name, "tiny");
  EXPECT_EQ(cfg.epochs, 4u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 1}));
  EXPECT_EQ(cfg.task(), Task::regression);
  EXPECT_EQ(cfg.batch_size, 0u);
  EXPECT_EQ(cfg.dataset.regression.target, RegressionTarget::sin_sum);
  EXPECT_DOUBLE_EQ(cfg.dataset.regression.noise_sigma, 0.2);
  EXPECT_EQ(cfg.checkpoints, (std::vector<std::size_t>{4}));
  const auto text = cfg.to_text();
  for (const char* key : {"noise_sigma = 0.2", "batch_size = 0", "beta2 = 0.999", "eps = 1e-08", "threads = 1"})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(Config, TextRoundTrip) {
  auto cfg = ExperimentConfig::parse(kTinyRegression);
  auto again = ExperimentConfig::parse(cfg.to_text());
  EXPECT_EQ(again.to_text(), cfg.to_text());
  EXPECT_EQ(again.to_json(), cfg.to_json());

  auto mnist = mnist_experiment(mnist_spinal_cnn_spec(8), "/data/mnist", 8, {1}, 10000);
  auto mnist_again = ExperimentConfig::parse(mnist.to_text());
  EXPECT_EQ(mnist_again.to_text(), mnist.to_text());
  EXPECT_EQ(mnist_again.dataset.train_limit, 10000u);
  EXPECT_EQ(mnist_again.optimizer.kind, OptimizerKind::sgd);
}

TEST(Config, ImageDefaults) {
  auto cfg = ExperimentConfig::parse(
      "[experiment]\nepochs = 2\n[model]\ninput 1x28x28\nflatten\nlinear in=784 out=10\nlog_softmax\n"
      "[dataset]\nkind = idx\n",
      "/some/dir");
  EXPECT_EQ(cfg.task(), Task::classification);
  EXPECT_EQ(cfg.batch_size, 64u);
  EXPECT_EQ(cfg.optimizer.kind, OptimizerKind::sgd);
  EXPECT_DOUBLE_EQ(cfg.optimizer.momentum, 0.5);
  EXPECT_EQ(cfg.dataset.data_dir, "/some/dir");
  EXPECT_EQ(cfg.dataset.resolve("x-idx"), std::filesystem::path("/some/dir/x-idx"));
  EXPECT_EQ(cfg.checkpoints, (std::vector<std::size_t>{2}));
}

TEST(Config, Errors) {
  const std::string model = "[model]\ninput 8\nlinear in=8 out=1\n";
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\nepochs = 1\n" + model), ConfigError);  // no dataset kind
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\n" + model + "[dataset]\nkind = regression\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\nepochs = 1\ncolour = red\n" + model + "[dataset]\nkind = regression\n"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\nepochs = x\n" + model + "[dataset]\nkind = regression\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\nepochs = 1\n" + model + "[dataset]\nkind = csv\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[nope]\n" + model), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\nepochs = 1\nepochs = 2\n" + model + "[dataset]\nkind = regression\n"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\nepochs = 3\ncheckpoints = 4\n" + model + "[dataset]\nkind = regression\n"),
               ConfigError);
  // Classification models must end in log_softmax.
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\nepochs = 1\n[model]\ninput 4\nlinear in=4 out=2\n[dataset]\nkind = idx\n"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[experiment]\nepochs = 1\n[model]\ninput 4\nlinear in=3 out=1\n[dataset]\nkind = regression\n"),
               SpecError);
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.ini"), ConfigError);
}

TEST(Config, DefaultCheckpoints) {
  EXPECT_EQ(default_checkpoints(Task::regression, 200), (std::vector<std::size_t>{100, 200}));
  EXPECT_EQ(default_checkpoints(Task::regression, 250), (std::vector<std::size_t>{100, 200, 250}));
  EXPECT_EQ(default_checkpoints(Task::regression, 50), (std::vector<std::size_t>{50}));
  EXPECT_EQ(default_checkpoints(Task::classification, 8), (std::vector<std::size_t>{8}));
  EXPECT_TRUE(default_checkpoints(Task::classification, 0).empty());
}

TEST(Experiment, CsvIsDeterministic) {
  auto cfg = ExperimentConfig::parse(kTinyRegression);
  const auto first = csv_of(run_experiment(cfg));
  const auto second = csv_of(run_experiment(cfg));
  EXPECT_EQ(first, second);
  std::istringstream lines(first);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, kMetricsCsvHeader);
  std::size_t rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  EXPECT_EQ(rows, 8u);
  EXPECT_EQ(first.substr(header.size() + 1, 4), "3,1,");
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
  auto cfg = ExperimentConfig::parse(kTinyRegression);
  cfg.seeds = {1, 2, 3, 4};
  const auto serial = csv_of(run_experiment(cfg));
  cfg.threads = 3;
  EXPECT_EQ(csv_of(run_experiment(cfg)), serial);
}

TEST(Experiment, SeedsGiveDifferentRuns) {
  auto cfg = ExperimentConfig::parse(kTinyRegression);
  auto r = run_experiment(cfg);
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_NE(r.runs[0].metrics[0].train_loss, r.runs[1].metrics[0].train_loss);
  EXPECT_EQ(r.runs[0].registered_params, r.cost.total_params);
}

TEST(Experiment, SummaryHasFixedKeys) {
  auto cfg = ExperimentConfig::parse(kTinyRegression);
  cfg.epochs = 3;
  cfg.checkpoints = {2, 3};
  auto r = run_experiment(cfg);
  auto s = summarize(r);
  std::vector<std::string> keys;
  for (auto it = s.begin(); it != s.end(); ++it) keys.push_back(it.key());
  auto expected = summary_keys();
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(keys, expected);
  ASSERT_EQ(s["checkpoints"].size(), 2u);
  const auto& cp = s["checkpoints"][1];
  EXPECT_EQ(cp["epoch"], 3);
  const auto stats = checkpoint_stats(r, 3);
  EXPECT_DOUBLE_EQ(cp["mean"].get<double>(), stats.mean);
  EXPECT_LE(stats.min, stats.mean);
  EXPECT_GE(stats.max, stats.mean);
  EXPECT_EQ(s["config"]["dataset"]["noise_sigma"], 0.2);
  EXPECT_EQ(s["metric"], "test_mse");
  EXPECT_THROW(checkpoint_stats(r, 9), ConfigError);
}

TEST(Experiment, ZeroEpochsWritesHeaderOnly) {
  auto cfg = ExperimentConfig::parse(kTinyRegression);
  ExperimentResult empty{cfg, {}, {}};
  EXPECT_EQ(csv_of(empty), std::string(kMetricsCsvHeader) + "\n");
  cfg.epochs = 0;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
}

TEST(Experiment, MissingIdxFilesFail) {
  auto cfg = mnist_experiment(mnist_cnn_spec(), "/nonexistent/mnist", 1, {1});
  EXPECT_THROW(run_experiment(cfg), ParseError);
}

TEST(Experiment, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, 0.0}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(Reproduce, CountChecksAllPass) {
  for (const auto& c : regression_count_checks()) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  for (const auto& c : mnist_count_checks()) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Reproduce, CountsOnlyReports) {
  ReproduceOptions opt;
  opt.counts_only = true;
  auto t1 = reproduce("t1", opt);
  auto t2 = reproduce("t2-mnist", opt);
  EXPECT_TRUE(t1.passed());
  EXPECT_TRUE(t2.passed());
  EXPECT_EQ(t1.checks.size(), 5u);
  std::ostringstream os;
  t2.print(os);
  EXPECT_NE(os.str().find("PASS  mnist spinal-8 params"), std::string::npos);
  EXPECT_THROW(reproduce("t3", opt), ConfigError);
}

TEST(Reproduce, ShortRegressionRun) {
  ReproduceOptions opt;
  opt.seeds = {1};
  opt.epochs = 3;
  auto report = reproduce_t1(opt);
  EXPECT_EQ(report.runs.size(), 8u);
  std::ostringstream os;
  report.print(os);
  EXPECT_NE(os.str().find("sin_prod"), std::string::npos);
}

TEST(ReferenceValues, TableShape) {
  EXPECT_EQ(reference::kRegressionMse.size(), 4u);
  EXPECT_DOUBLE_EQ(reference::kRegressionMse[0].spinal_200, 0.855);
  EXPECT_DOUBLE_EQ(reference::kMnistSpinal8Accuracy, 98.44);
}
