#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "cvae/optimizer.hpp"
#include "cvae/sparse.hpp"
#include "cvae/vae.hpp"

namespace cvae {

enum class Phase { pretrain, refine };

/// cvae: pretrain on side information then refine on ratings.
/// fvae: pretrain only. rvae: refine only, from a fresh initialization.
enum class Method { cvae, fvae, rvae };

std::string_view to_string(Phase phase);
std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct TrainConfig {
  /// Network shape, alpha and L. `model.beta` is overridden per phase.
  ModelConfig model;
  double beta_pre = 0.1;
  double beta_refine = 2.0;
  std::size_t epochs_pretrain = 100;
  std::size_t epochs_refine = 100;
  std::size_t batch_size = 100;
  OptimizerSettings optimizer;
  std::uint64_t seed = 42;

  void validate() const;
  /// `model` with beta set to the phase's value.
  ModelConfig phase_model(Phase phase) const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double objective = 0.0;  // mean per-sample ELBO over the epoch
};

struct TrainRun {
  TrainConfig config;
  Phase phase = Phase::pretrain;
  double beta = 0.0;
  std::vector<EpochRecord> log;
};

struct PhaseResult {
  VaeParams params;
  TrainRun run;
};

/// Fresh parameters for `n` items from the run seed.
VaeParams initial_params(std::size_t n, const TrainConfig& config);

/// Trains a fresh model on the d columns of the n x d side-information
/// matrix with the Gaussian head and beta_pre. Throws DivergenceError if an
/// epoch objective is non-finite.
PhaseResult pretrain(const SparseBinaryMatrix& features, const TrainConfig& config);

/// Continues training `params` on the user rows of `ratings` with the
/// Bernoulli head and beta_refine.
PhaseResult refine(VaeParams params, const SparseBinaryMatrix& ratings,
                   const TrainConfig& config);

struct TrainResult {
  VaeParams params;
  std::optional<TrainRun> pretrain_run;
  std::optional<TrainRun> refine_run;
};

/// refine(pretrain(features), ratings).
TrainResult train_cvae(const SparseBinaryMatrix& features, const SparseBinaryMatrix& ratings,
                       const TrainConfig& config);

/// Dispatches on `method`; `features` is unused for rvae and `ratings` for
/// fvae (only their shapes are checked).
TrainResult train_method(Method method, const SparseBinaryMatrix& features,
                         const SparseBinaryMatrix& ratings, const TrainConfig& config);

/// `epoch<TAB>objective` per line.
void write_epoch_log(std::ostream& out, const TrainRun& run);

}  // namespace cvae
