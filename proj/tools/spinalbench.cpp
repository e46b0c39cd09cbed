// spinalbench: cost accounting, training runs, the shallow-network
// equivalence check and the reproduction recipes.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "spinal/config.hpp"
#include "spinal/cost.hpp"
#include "spinal/equivalence.hpp"
#include "spinal/errors.hpp"
#include "spinal/experiment.hpp"
#include "spinal/reproduce.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spinal::ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A cost input is either a full experiment config or a bare model description.
spinal::ModelSpec load_model(const std::string& path) {
  const std::string text = slurp(path);
  if (text.find("[model]") != std::string::npos) return spinal::ExperimentConfig::parse(text).model;
  return spinal::ModelSpec::parse(text);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw spinal::ConfigError("cannot write " + path);
  out << text;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(item));
  if (seeds.empty()) throw spinal::ConfigError("empty seed list");
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SpinalNet benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string data_dir = spinal::data_dir_from_env().string();
  app.add_option("--data-dir", data_dir, "Default IDX directory (env SPINAL_DATA_DIR)");

  // cost
  auto* cost = app.add_subcommand("cost", "Print parameter, multiplication and activation counts as JSON");
  std::string cost_config;
  std::string cost_out;
  cost->add_option("config", cost_config, "Experiment config or model description")->required();
  cost->add_option("-o,--out", cost_out, "Write JSON here instead of stdout");

  // train
  auto* train = app.add_subcommand("train", "Train every seed of a config; CSV metrics plus a JSON summary");
  std::string train_config;
  std::string csv_path;
  std::string summary_path;
  std::string seeds_override;
  std::size_t epochs_override = 0;
  bool epochs_given = false;
  std::size_t threads_override = 0;
  bool threads_given = false;
  train->add_option("config", train_config, "Experiment config")->required();
  train->add_option("--csv", csv_path, "CSV destination (default: config, else stdout)");
  train->add_option("--summary", summary_path, "JSON summary destination (default: config, else stderr)");
  train->add_option("--seeds", seeds_override, "Comma-separated seeds");
  auto* epochs_opt = train->add_option("--epochs", epochs_override, "Override epochs");
  auto* threads_opt = train->add_option("--threads", threads_override, "Worker threads (0 = all cores)");

  // equivalence
  auto* equiv = app.add_subcommand("equivalence", "Check spinal layers built from random shallow networks");
  spinal::EquivalenceOptions eq;
  std::string act_name = "tanh";
  equiv->add_option("--hidden", eq.hidden_width, "Shallow hidden width H")->required();
  equiv->add_option("--input", eq.input_width, "Input width d")->required();
  equiv->add_option("--act", act_name, "tanh | relu | identity");
  equiv->add_option("--trials", eq.trials, "Random networks");
  equiv->add_option("--inputs", eq.inputs_per_trial, "Random inputs per network");
  equiv->add_option("--outputs", eq.output_width, "Output width");
  equiv->add_option("--block", eq.block_width, "Hidden units per sub-layer");
  equiv->add_option("--seed", eq.seed, "RNG seed");
  equiv->add_flag("--zero", eq.zero_weights, "Use all-zero shallow weights");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "Run the published comparison for t1 or t2-mnist");
  std::string table;
  spinal::ReproduceOptions ro;
  std::string repro_seeds;
  std::string repro_json;
  repro->add_option("table", table, "t1 | t2-mnist")->required();
  repro->add_option("--data-dir", data_dir, "IDX directory (env SPINAL_DATA_DIR)");
  repro->add_option("--seeds", repro_seeds, "Comma-separated seeds (default 1,2,3)");
  repro->add_option("--epochs", ro.epochs, "Override epochs");
  repro->add_option("--train-limit", ro.train_limit, "Use the first N training images");
  repro->add_option("--threads", ro.threads, "Worker threads per experiment (0 = all cores)");
  repro->add_flag("--counts-only", ro.counts_only, "Structural checks only");
  repro->add_option("--json", repro_json, "Write run summaries as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }
  epochs_given = epochs_opt->count() > 0;
  threads_given = threads_opt->count() > 0;

  try {
    if (*cost) {
      const auto json = spinal::analyze_cost(load_model(cost_config)).to_json().dump(2) + "\n";
      if (cost_out.empty()) {
        std::cout << json;
      } else {
        write_text(cost_out, json);
      }
      return 0;
    }

    if (*train) {
      auto cfg = spinal::ExperimentConfig::load(train_config, data_dir);
      if (!seeds_override.empty()) cfg.seeds = parse_seeds(seeds_override);
      if (epochs_given) {
        cfg.epochs = epochs_override;
        cfg.checkpoints = spinal::default_checkpoints(cfg.task(), cfg.epochs);
      }
      if (threads_given) cfg.threads = threads_override;
      if (!csv_path.empty()) cfg.csv_path = csv_path;
      if (!summary_path.empty()) cfg.summary_path = summary_path;

      spinal::ExperimentResult result{cfg, spinal::analyze_cost(cfg.model), {}};
      if (cfg.epochs > 0) result = spinal::run_experiment(cfg);

      std::ostringstream csv;
      spinal::write_metrics_csv(csv, result);
      if (cfg.csv_path.empty()) {
        std::cout << csv.str() << std::flush;
      } else {
        write_text(cfg.csv_path, csv.str());
      }
      if (cfg.epochs > 0) {
        const auto summary = spinal::summarize(result).dump(2) + "\n";
        if (cfg.summary_path.empty()) {
          std::cerr << summary;
        } else {
          write_text(cfg.summary_path, summary);
        }
      }
      return 0;
    }

    if (*equiv) {
      eq.act = spinal::parse_activation(act_name);
      const auto r = spinal::run_equivalence(eq);
      const bool ok = r.max_abs_discrepancy < 1e-9;
      std::cout << "hidden=" << eq.hidden_width << " input=" << eq.input_width << " act=" << spinal::to_string(eq.act)
                << " sublayers=" << r.sublayers << " trials=" << r.trials << " evaluations=" << r.evaluations
                << " max_abs_discrepancy=" << spinal::format_number(r.max_abs_discrepancy) << ' '
                << (ok ? "PASS" : "FAIL") << '\n';
      return ok ? 0 : kExitCheckFailed;
    }

    if (*repro) {
      ro.data_dir = data_dir;
      if (!repro_seeds.empty()) ro.seeds = parse_seeds(repro_seeds);
      ro.log = &std::cerr;
      if (table != "t1" && table != "t2-mnist") {
        std::cerr << "error: unknown table '" << table << "'; expected t1 or t2-mnist\n";
        return kExitUsage;
      }
      const auto report = spinal::reproduce(table, ro);
      report.print(std::cout);
      if (!repro_json.empty()) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : report.runs) runs.push_back(spinal::summarize(r));
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        write_text(repro_json, nlohmann::json{{"table", report.table}, {"checks", checks}, {"runs", runs}}.dump(2) + "\n");
      }
      return report.passed() ? 0 : kExitCheckFailed;
    }
  } catch (const spinal::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const spinal::SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
