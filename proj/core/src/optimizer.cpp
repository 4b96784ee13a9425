#include "cvae/optimizer.hpp"

#include <cmath>
#include <string>

#include "cvae/errors.hpp"

namespace cvae {

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "sgd") return OptimizerKind::sgd;
  throw DomainError("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::adam ? "adam" : "sgd";
}

Optimizer::Optimizer(OptimizerSettings settings) {
  if (!(settings.learning_rate > 0.0)) throw DomainError("learning rate must be positive");
  state_.settings = settings;
}

void Optimizer::ascend(std::span<const std::span<double>> params,
                       std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size()) throw ShapeError("parameter/gradient view count differs");
  std::size_t total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size())
      throw ShapeError("parameter/gradient view " + std::to_string(i) + " differs in size");
    for (double g : grads[i])
      if (!std::isfinite(g)) throw NumericError("non-finite gradient; step refused");
    total += params[i].size();
  }

  auto& s = state_;
  const auto& cfg = s.settings;
  if (cfg.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i)
      for (std::size_t j = 0; j < params[i].size(); ++j)
        params[i][j] += cfg.learning_rate * grads[i][j];
    ++s.step;
    return;
  }

  if (s.step == 0) {
    s.first_moment.assign(total, 0.0);
    s.second_moment.assign(total, 0.0);
  } else if (s.first_moment.size() != total) {
    throw ShapeError("parameter count changed between optimizer steps");
  }
  ++s.step;
  const double t = static_cast<double>(s.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  std::size_t k = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = 0; j < params[i].size(); ++j, ++k) {
      // descent on -g
      const double g = -grads[i][j];
      double& m = s.first_moment[k];
      double& v = s.second_moment[k];
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
      params[i][j] -= cfg.learning_rate * (m / c1) / (std::sqrt(v / c2) + cfg.epsilon);
    }
  }
}

}  // namespace cvae
