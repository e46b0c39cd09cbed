#include "spinal/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "spinal/errors.hpp"
#include "spinal/experiment.hpp"

namespace spinal {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

using Section = std::map<std::string, std::string, std::less<>>;

class Sections {
 public:
  Section& at(const std::string& name) { return sections_[name]; }
  bool has(const std::string& name) const { return sections_.count(name) > 0; }
  std::string model_text;

  void check_known() const {
    static const std::map<std::string, std::vector<std::string>> known{
        {"experiment", {"name", "epochs", "batch_size", "seeds", "checkpoints", "threads"}},
        {"dataset",
         {"kind", "target", "num_vars", "noise_sigma", "train_samples", "test_samples", "data_dir", "train_images", "train_labels",
          "test_images", "test_labels", "num_classes", "train_limit", "test_limit", "standardize"}},
        {"optimizer", {"kind", "lr", "momentum", "beta1", "beta2", "eps"}},
        {"output", {"csv", "summary"}},
    };
    for (const auto& [name, keys] : sections_) {
      auto it = known.find(name);
      if (it == known.end()) throw ConfigError("config: unknown section [" + name + "]");
      for (const auto& [k, v] : keys) {
        if (std::find(it->second.begin(), it->second.end(), k) == it->second.end()) {
          throw ConfigError("config: unknown key '" + k + "' in [" + name + "]");
        }
      }
    }
  }

 private:
  std::map<std::string, Section> sections_;
};

Sections split_sections(std::string_view text) {
  Sections out;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(std::string_view(raw).substr(0, std::string_view(raw).find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: line " + std::to_string(line_no) + ": malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current != "model") out.at(current);
      continue;
    }
    if (current.empty()) throw ConfigError("config: line " + std::to_string(line_no) + ": content before any section");
    if (current == "model") {
      out.model_text += std::string(line) + "\n";
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + ": expected key = value in [" + current + "]");
    }
    auto key = std::string(trim(line.substr(0, eq)));
    auto value = std::string(trim(line.substr(eq + 1)));
    if (!out.at(current).emplace(key, value).second) {
      throw ConfigError("config: duplicate key '" + key + "' in [" + current + "]");
    }
  }
  out.check_known();
  return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& key) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("config: bad value '" + s + "' for " + key);
  return v;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: bad boolean '" + s + "' for " + key);
}

template <class T>
std::vector<T> parse_list(const std::string& s, const std::string& key) {
  std::vector<T> out;
  std::string_view rest(s);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (item.empty()) throw ConfigError("config: empty list item in " + key);
    out.push_back(parse_number<T>(std::string(item), key));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s;
}

const std::string* find(const Section& s, std::string_view key) {
  auto it = s.find(key);
  return it == s.end() ? nullptr : &it->second;
}

}  // namespace

std::filesystem::path DatasetConfig::resolve(const std::string& name) const {
  std::filesystem::path p(name);
  if (p.is_relative() && !data_dir.empty()) p = data_dir / p;
  if (!std::filesystem::exists(p)) {
    auto gz = p;
    gz += ".gz";
    if (std::filesystem::exists(gz)) return gz;
  }
  return p;
}

std::vector<std::size_t> default_checkpoints(Task task, std::size_t epochs) {
  std::vector<std::size_t> out;
  if (epochs == 0) return out;
  if (task == Task::regression) {
    for (std::size_t e : {100u, 200u}) {
      if (e <= epochs) out.push_back(e);
    }
  }
  if (out.empty() || out.back() != epochs) out.push_back(epochs);
  return out;
}

std::filesystem::path data_dir_from_env() {
  const char* v = std::getenv("SPINAL_DATA_DIR");
  return v ? std::filesystem::path(v) : std::filesystem::path();
}

ExperimentConfig ExperimentConfig::parse(std::string_view text, const std::filesystem::path& default_data_dir) {
  auto sections = split_sections(text);
  ExperimentConfig cfg;
  cfg.model = ModelSpec::parse(sections.model_text);
  if (cfg.model.layers.empty()) throw ConfigError("config: [model] section is empty");

  auto& ds = sections.at("dataset");
  if (auto v = find(ds, "kind")) {
    if (*v == "regression") {
      cfg.dataset.kind = DatasetConfig::Kind::regression;
    } else if (*v == "idx") {
      cfg.dataset.kind = DatasetConfig::Kind::idx;
    } else {
      throw ConfigError("config: dataset kind must be regression or idx, got '" + *v + "'");
    }
  } else {
    throw ConfigError("config: [dataset] needs kind = regression | idx");
  }
  auto& rs = cfg.dataset.regression;
  if (auto v = find(ds, "target")) rs.target = parse_regression_target(*v);
  if (auto v = find(ds, "num_vars")) rs.num_vars = parse_number<std::size_t>(*v, "num_vars");
  if (auto v = find(ds, "noise_sigma")) rs.noise_sigma = parse_number<double>(*v, "noise_sigma");
  if (auto v = find(ds, "train_samples")) rs.train_samples = parse_number<std::size_t>(*v, "train_samples");
  if (auto v = find(ds, "test_samples")) rs.test_samples = parse_number<std::size_t>(*v, "test_samples");
  cfg.dataset.data_dir = default_data_dir;
  if (auto v = find(ds, "data_dir")) cfg.dataset.data_dir = *v;
  if (auto v = find(ds, "train_images")) cfg.dataset.train_images = *v;
  if (auto v = find(ds, "train_labels")) cfg.dataset.train_labels = *v;
  if (auto v = find(ds, "test_images")) cfg.dataset.test_images = *v;
  if (auto v = find(ds, "test_labels")) cfg.dataset.test_labels = *v;
  if (auto v = find(ds, "num_classes")) cfg.dataset.num_classes = parse_number<std::size_t>(*v, "num_classes");
  if (auto v = find(ds, "train_limit")) cfg.dataset.train_limit = parse_number<std::size_t>(*v, "train_limit");
  if (auto v = find(ds, "test_limit")) cfg.dataset.test_limit = parse_number<std::size_t>(*v, "test_limit");
  if (auto v = find(ds, "standardize")) cfg.dataset.standardize = parse_bool(*v, "standardize");

  const bool classify = cfg.dataset.kind == DatasetConfig::Kind::idx;
  // Defaults follow the dataset kind: full-batch Adam for regression,
  // SGD with momentum on 64-sample batches for images.
  cfg.batch_size = classify ? 64 : 0;
  cfg.optimizer = classify ? OptimizerConfig{OptimizerKind::sgd, 0.05, 0.5} : OptimizerConfig{OptimizerKind::adam, 0.01, 0.0};

  auto& ex = sections.at("experiment");
  if (auto v = find(ex, "name")) cfg.name = *v;
  if (auto v = find(ex, "epochs")) {
    cfg.epochs = parse_number<std::size_t>(*v, "epochs");
  } else {
    throw ConfigError("config: [experiment] needs epochs");
  }
  if (auto v = find(ex, "batch_size")) cfg.batch_size = parse_number<std::size_t>(*v, "batch_size");
  if (auto v = find(ex, "seeds")) cfg.seeds = parse_list<std::uint64_t>(*v, "seeds");
  if (cfg.seeds.empty()) throw ConfigError("config: seeds must not be empty");
  if (auto v = find(ex, "threads")) cfg.threads = parse_number<std::size_t>(*v, "threads");
  if (auto v = find(ex, "checkpoints")) {
    cfg.checkpoints = parse_list<std::size_t>(*v, "checkpoints");
    for (auto c : cfg.checkpoints) {
      if (c == 0 || c > cfg.epochs) throw ConfigError("config: checkpoint " + std::to_string(c) + " outside 1.." + std::to_string(cfg.epochs));
    }
  } else {
    cfg.checkpoints = default_checkpoints(cfg.task(), cfg.epochs);
  }

  auto& op = sections.at("optimizer");
  if (auto v = find(op, "kind")) cfg.optimizer.kind = parse_optimizer_kind(*v);
  if (auto v = find(op, "lr")) cfg.optimizer.lr = parse_number<double>(*v, "lr");
  if (auto v = find(op, "momentum")) cfg.optimizer.momentum = parse_number<double>(*v, "momentum");
  if (auto v = find(op, "beta1")) cfg.optimizer.beta1 = parse_number<double>(*v, "beta1");
  if (auto v = find(op, "beta2")) cfg.optimizer.beta2 = parse_number<double>(*v, "beta2");
  if (auto v = find(op, "eps")) cfg.optimizer.eps = parse_number<double>(*v, "eps");

  auto& out = sections.at("output");
  if (auto v = find(out, "csv")) cfg.csv_path = *v;
  if (auto v = find(out, "summary")) cfg.summary_path = *v;

  cfg.model.infer_shapes();
  const auto& last = cfg.model.layers.back();
  if (classify && !std::holds_alternative<LogSoftmaxDesc>(last)) {
    throw ConfigError("config: classification models must end in log_softmax");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path, const std::filesystem::path& default_data_dir) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), default_data_dir);
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "[experiment]\n"
     << "name = " << name << '\n'
     << "epochs = " << epochs << '\n'
     << "batch_size = " << batch_size << '\n'
     << "seeds = " << join(seeds) << '\n'
     << "checkpoints = " << join(checkpoints) << '\n'
     << "threads = " << threads << "\n\n"
     << "[model]\n"
     << model.to_text() << '\n'
     << "[dataset]\n";
  if (dataset.kind == DatasetConfig::Kind::regression) {
    const auto& r = dataset.regression;
    os << "kind = regression\n"
       << "target = " << to_string(r.target) << '\n'
       << "num_vars = " << r.num_vars << '\n'
       << "noise_sigma = " << format_number(r.noise_sigma) << '\n'
       << "train_samples = " << r.train_samples << '\n'
       << "test_samples = " << r.test_samples << '\n';
  } else {
    os << "kind = idx\n"
       << "data_dir = " << dataset.data_dir.string() << '\n'
       << "train_images = " << dataset.train_images << '\n'
       << "train_labels = " << dataset.train_labels << '\n'
       << "test_images = " << dataset.test_images << '\n'
       << "test_labels = " << dataset.test_labels << '\n'
       << "num_classes = " << dataset.num_classes << '\n'
       << "train_limit = " << dataset.train_limit << '\n'
       << "test_limit = " << dataset.test_limit << '\n'
       << "standardize = " << (dataset.standardize ? "true" : "false") << '\n';
  }
  os << "\n[optimizer]\n"
     << "kind = " << to_string(optimizer.kind) << '\n'
     << "lr = " << format_number(optimizer.lr) << '\n'
     << "momentum = " << format_number(optimizer.momentum) << '\n'
     << "beta1 = " << format_number(optimizer.beta1) << '\n'
     << "beta2 = " << format_number(optimizer.beta2) << '\n'
     << "eps = " << format_number(optimizer.eps) << "\n\n"
     << "[output]\n"
     << "csv = " << csv_path << '\n'
     << "summary = " << summary_path << '\n';
  return os.str();
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json ds;
  if (dataset.kind == DatasetConfig::Kind::regression) {
    const auto& r = dataset.regression;
    ds = {{"kind", "regression"},
          {"target", std::string(to_string(r.target))},
          {"num_vars", r.num_vars},
          {"noise_sigma", r.noise_sigma},
          {"input_distribution", "uniform[-1,1]"},
          {"train_samples", r.train_samples},
          {"test_samples", r.test_samples}};
  } else {
    ds = {{"kind", "idx"},
          {"data_dir", dataset.data_dir.string()},
          {"train_images", dataset.train_images},
          {"train_labels", dataset.train_labels},
          {"test_images", dataset.test_images},
          {"test_labels", dataset.test_labels},
          {"num_classes", dataset.num_classes},
          {"train_limit", dataset.train_limit},
          {"test_limit", dataset.test_limit},
          {"standardize", dataset.standardize},
          {"pixel_scale", "1/255"}};
  }
  return {{"name", name},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"seeds", seeds},
          {"checkpoints", checkpoints},
          {"threads", threads},
          {"model", model.to_text()},
          {"dataset", ds},
          {"optimizer",
           {{"kind", std::string(to_string(optimizer.kind))},
            {"lr", optimizer.lr},
            {"momentum", optimizer.momentum},
            {"beta1", optimizer.beta1},
            {"beta2", optimizer.beta2},
            {"eps", optimizer.eps}}},
          {"init", "uniform(+-1/sqrt(fan_in))"},
          {"output", {{"csv", csv_path}, {"summary", summary_path}}}};
}

}  // namespace spinal
