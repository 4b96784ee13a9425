#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace cvae {

enum class OptimizerKind { adam, sgd };

OptimizerKind parse_optimizer_kind(std::string_view name);
std::string_view to_string(OptimizerKind kind);

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  OptimizerSettings settings;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;
};

/// First-order optimizer performing gradient *ascent*: `grads` are
/// derivatives of an objective to be maximized (the ELBO). Internally the
/// update is the usual descent step on the negated objective, so for SGD
/// `p += lr * g`.
class Optimizer {
 public:
  explicit Optimizer(OptimizerSettings settings = {});

  /// Updates `params` in place. Throws NumericError and leaves `params`
  /// untouched if any gradient is non-finite; throws ShapeError if the
  /// views are not congruent with each other or with earlier steps.
  void ascend(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads);

  const OptimizerState& state() const { return state_; }

 private:
  OptimizerState state_;
};

}  // namespace cvae
