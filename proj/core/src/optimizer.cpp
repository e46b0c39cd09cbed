#include <cmath>

#include "spinal/errors.hpp"
#include "spinal/train.hpp"

namespace spinal {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (sgd, adam)");
}

Optimizer::Optimizer(std::vector<Tensor> params, OptimizerConfig config)
    : params_(std::move(params)), config_(config) {
  if (!(config_.lr > 0.0)) throw ConfigError("optimizer: learning rate must be positive");
  if (config_.momentum < 0.0 || config_.momentum >= 1.0) throw ConfigError("optimizer: momentum must lie in [0, 1)");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].requires_grad() || !params_[i].is_leaf()) {
      throw ContractError("optimizer: parameter " + std::to_string(i) + " is not a trainable leaf");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (params_[j].same_as(params_[i])) throw ContractError("optimizer: parameter registered twice");
    }
  }
  m_.resize(params_.size());
  v_.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (config_.kind == OptimizerKind::adam || config_.momentum > 0.0) m_[i].assign(params_[i].numel(), 0.0);
    if (config_.kind == OptimizerKind::adam) v_[i].assign(params_[i].numel(), 0.0);
  }
}

std::size_t Optimizer::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.numel();
  return n;
}

void Optimizer::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void Optimizer::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].has_grad()) {
      throw ContractError("optimizer: parameter " + std::to_string(i) + " " + to_string(params_[i].shape()) +
                          " has no gradient; run backward first");
    }
  }
  ++t_;
  const double lr = config_.lr;
  if (config_.kind == OptimizerKind::sgd) {
    const double mu = config_.momentum;
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto p = params_[i].mutable_data();
      auto g = params_[i].grad();
      if (mu > 0.0) {
        auto& buf = m_[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
          buf[j] = mu * buf[j] + g[j];
          p[j] -= lr * buf[j];
        }
      } else {
        for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
      }
    }
  } else {
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto p = params_[i].mutable_data();
      auto g = params_[i].grad();
      auto& m = m_[i];
      auto& v = v_[i];
      for (std::size_t j = 0; j < p.size(); ++j) {
        m[j] = b1 * m[j] + (1.0 - b1) * g[j];
        v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
        const double mhat = m[j] / c1;
        const double vhat = v[j] / c2;
        p[j] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
      }
    }
  }
  zero_grad();
}

}  // namespace spinal
