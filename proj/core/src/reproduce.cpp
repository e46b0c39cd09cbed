#include "spinal/reproduce.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "spinal/cost.hpp"
#include "spinal/errors.hpp"
#include "spinal/presets.hpp"
#include "spinal/reference_values.hpp"

namespace spinal {

namespace {

CheckResult exact(std::string name, std::uint64_t measured, std::uint64_t expected) {
  return {std::move(name), measured == expected,
          "measured " + std::to_string(measured) + ", expected " + std::to_string(expected)};
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void log_line(const ReproduceOptions& options, const std::string& line) {
  if (options.log) *options.log << line << std::endl;
}

constexpr std::array<RegressionTarget, 4> kTargets{RegressionTarget::sum, RegressionTarget::sin_sum, RegressionTarget::prod,
                                                   RegressionTarget::sin_prod};

}  // namespace

bool ReproduceReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::vector<CheckResult> regression_count_checks() {
  const auto base = analyze_cost(regression_baseline_spec());
  const auto spinal = analyze_cost(regression_spinal_spec());
  std::vector<CheckResult> out;
  out.push_back(exact("regression baseline params", base.total_params, reference::kRegressionBaselineParams));
  out.push_back(exact("regression spinal params", spinal.total_params, reference::kRegressionSpinalParams));
  out.push_back(exact("regression baseline mults", base.total_mults, reference::kRegressionBaselineMults));
  out.push_back(exact("regression spinal mults", spinal.total_mults, reference::kRegressionSpinalMults));
  const double reduction = reduction_percent(static_cast<double>(base.total_mults), static_cast<double>(spinal.total_mults));
  out.push_back({"regression mult reduction", std::round(reduction * 10.0) / 10.0 == reference::kRegressionMultReductionPercent,
                 "measured " + fixed(reduction, 2) + "%, quoted " + fixed(reference::kRegressionMultReductionPercent, 1) + "%"});
  return out;
}

std::vector<CheckResult> mnist_count_checks() {
  const auto cnn = analyze_cost(mnist_cnn_spec());
  const auto s8 = analyze_cost(mnist_spinal_cnn_spec(8));
  const auto s10 = analyze_cost(mnist_spinal_cnn_spec(10));
  std::vector<CheckResult> out;
  out.push_back(exact("mnist cnn params", cnn.total_params, reference::kMnistCnnParams));
  out.push_back(exact("mnist spinal-8 params", s8.total_params, reference::kMnistSpinal8Params));
  out.push_back(exact("mnist spinal-10 params", s10.total_params, reference::kMnistSpinal10Params));
  const double reduction = reduction_percent(static_cast<double>(cnn.fc_mults), static_cast<double>(s8.fc_mults));
  out.push_back({"mnist fc mult reduction", reduction > reference::kMnistFcMultReductionPercent,
                 "measured " + fixed(reduction, 2) + "% (" + std::to_string(cnn.fc_mults) + " -> " +
                     std::to_string(s8.fc_mults) + "), quoted more than " +
                     fixed(reference::kMnistFcMultReductionPercent, 1) + "%"});
  out.push_back(exact("mnist cnn fc activations", cnn.fc_activations, reference::kMnistCnnFcActivations));
  out.push_back(exact("mnist spinal-8 fc activations", s8.fc_activations, reference::kMnistSpinal8FcActivations));
  return out;
}

ReproduceReport reproduce_t1(const ReproduceOptions& options) {
  ReproduceReport report;
  report.table = "t1";
  report.checks = regression_count_checks();
  if (options.counts_only) return report;

  const std::size_t epochs = options.epochs ? options.epochs : 200;
  DataCache cache;
  std::size_t within_ratio = 0;
  for (auto target : kTargets) {
    auto base_cfg = regression_experiment(regression_baseline_spec(), target, epochs, options.seeds);
    auto spinal_cfg = regression_experiment(regression_spinal_spec(), target, epochs, options.seeds);
    base_cfg.name = "baseline-" + std::string(to_string(target));
    spinal_cfg.name = "spinal-" + std::string(to_string(target));
    base_cfg.threads = spinal_cfg.threads = options.threads;
    log_line(options, "training " + base_cfg.name);
    report.runs.push_back(run_experiment(base_cfg, cache));
    log_line(options, "training " + spinal_cfg.name);
    report.runs.push_back(run_experiment(spinal_cfg, cache));

    const auto base = checkpoint_stats(report.runs[report.runs.size() - 2], epochs);
    const auto spinal = checkpoint_stats(report.runs.back(), epochs);
    if (target == RegressionTarget::sum) {
      const double limit = reference::kRegressionSumMseFactor * reference::kRegressionNoiseSigma * reference::kRegressionNoiseSigma;
      report.checks.push_back({"sum target: baseline best mse below " + format_number(limit), base.max < limit,
                               "worst seed " + fixed(base.max, 5)});
      report.checks.push_back({"sum target: spinal best mse below " + format_number(limit), spinal.max < limit,
                               "worst seed " + fixed(spinal.max, 5)});
    }
    if (spinal.mean <= reference::kRegressionSpinalRatio * base.mean) ++within_ratio;
  }
  report.checks.push_back({"spinal within " + fixed(reference::kRegressionSpinalRatio, 1) + "x of baseline",
                           within_ratio >= reference::kRegressionTargetsRequired,
                           std::to_string(within_ratio) + " of 4 targets, need " +
                               std::to_string(reference::kRegressionTargetsRequired)});
  return report;
}

ReproduceReport reproduce_t2_mnist(const ReproduceOptions& options) {
  ReproduceReport report;
  report.table = "t2-mnist";
  report.checks = mnist_count_checks();
  if (options.counts_only) return report;

  const std::size_t epochs = options.epochs ? options.epochs : 8;
  DataCache cache;
  auto base_cfg = mnist_experiment(mnist_cnn_spec(), options.data_dir, epochs, options.seeds, options.train_limit);
  auto spinal_cfg = mnist_experiment(mnist_spinal_cnn_spec(8), options.data_dir, epochs, options.seeds, options.train_limit);
  base_cfg.name = "cnn";
  spinal_cfg.name = "cnn-spinal-8";
  base_cfg.threads = spinal_cfg.threads = options.threads;
  log_line(options, "training " + base_cfg.name);
  report.runs.push_back(run_experiment(base_cfg, cache));
  log_line(options, "training " + spinal_cfg.name);
  report.runs.push_back(run_experiment(spinal_cfg, cache));

  const auto base = checkpoint_stats(report.runs[0], epochs);
  const auto spinal = checkpoint_stats(report.runs[1], epochs);
  const bool subset = options.train_limit > 0 && options.train_limit < 60000;
  const double base_min = subset ? reference::kMnistSubsetMinAccuracy : reference::kMnistCnnMinAccuracy;
  const double spinal_min = subset ? reference::kMnistSubsetMinAccuracy : reference::kMnistSpinalMinAccuracy;
  report.checks.push_back({"cnn accuracy at least " + fixed(100 * base_min, 1) + "%", base.min >= base_min,
                           "worst seed " + fixed(100 * base.min, 2) + "%"});
  report.checks.push_back({"cnn-spinal-8 accuracy at least " + fixed(100 * spinal_min, 1) + "%", spinal.min >= spinal_min,
                           "worst seed " + fixed(100 * spinal.min, 2) + "%"});
  return report;
}

ReproduceReport reproduce(std::string_view table, const ReproduceOptions& options) {
  if (table == "t1") return reproduce_t1(options);
  if (table == "t2-mnist") return reproduce_t2_mnist(options);
  throw ConfigError("unknown table '" + std::string(table) + "'; expected t1 or t2-mnist");
}

void ReproduceReport::print(std::ostream& out) const {
  if (table == "t1" && !runs.empty()) {
    out << "target     model     published@100  published@200  measured@100 (mean)  measured@200 (mean, min..max)\n";
    for (std::size_t i = 0; i + 1 < runs.size(); i += 2) {
      const auto target = runs[i].config.dataset.regression.target;
      const reference::RegressionRow* row = nullptr;
      for (const auto& r : reference::kRegressionMse) {
        if (r.target == target) row = &r;
      }
      for (int which = 0; which < 2; ++which) {
        const auto& run = runs[i + which];
        const auto& cps = run.config.checkpoints;
        const double pub100 = which == 0 ? row->baseline_100 : row->spinal_100;
        const double pub200 = which == 0 ? row->baseline_200 : row->spinal_200;
        out << std::left << std::setw(11) << to_string(target) << std::setw(10) << (which == 0 ? "baseline" : "spinal")
            << std::setw(15) << fixed(pub100 * 1e-3, 5) << std::setw(15) << fixed(pub200 * 1e-3, 5);
        const bool has100 = std::find(cps.begin(), cps.end(), std::size_t{100}) != cps.end();
        out << std::setw(21) << (has100 ? fixed(checkpoint_stats(run, 100).mean, 5) : std::string("-"));
        const auto last = checkpoint_stats(run, run.config.epochs);
        out << fixed(last.mean, 5) << " (" << fixed(last.min, 5) << ".." << fixed(last.max, 5) << ")\n";
      }
    }
    out << "(published values are single runs with unreported noise; measured values use noise sigma "
        << fixed(reference::kRegressionNoiseSigma, 1) << ")\n";
  }
  if (table == "t2-mnist" && !runs.empty()) {
    out << "model          params  published acc  measured acc (mean, min..max)\n";
    const double published[2] = {reference::kMnistCnnAccuracy, reference::kMnistSpinal8Accuracy};
    for (std::size_t i = 0; i < runs.size() && i < 2; ++i) {
      const auto s = checkpoint_stats(runs[i], runs[i].config.epochs);
      out << std::left << std::setw(15) << runs[i].config.name << std::setw(8) << runs[i].cost.total_params << std::setw(15)
          << (fixed(published[i], 2) + "%") << fixed(100 * s.mean, 2) << "% (" << fixed(100 * s.min, 2) << ".."
          << fixed(100 * s.max, 2) << ")\n";
    }
  }
  for (const auto& c : checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": " << c.detail << '\n';
  }
  out << (passed() ? "all checks passed" : "some checks failed") << '\n';
}

}  // namespace spinal
