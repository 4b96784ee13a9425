#include "cvae/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>

#include "cvae/errors.hpp"
#include "cvae/rng.hpp"

namespace cvae {

namespace {

PhaseResult run_phase(VaeParams params, const SparseBinaryMatrix& samples, Head head,
                      Phase phase, const TrainConfig& config) {
  const ModelConfig model = config.phase_model(phase);
  PhaseResult result{std::move(params), TrainRun{config, phase, model.beta, {}}};
  VaeParams& p = result.params;
  if (samples.cols() != p.n)
    throw ShapeError("samples have width " + std::to_string(samples.cols()) +
                     " but the model expects " + std::to_string(p.n));

  const std::size_t epochs = phase == Phase::pretrain ? config.epochs_pretrain
                                                      : config.epochs_refine;
  const std::size_t count = samples.rows();
  if (epochs == 0 || count == 0) return result;

  const auto phase_key = static_cast<std::uint64_t>(phase);
  Optimizer optimizer(config.optimizer);
  auto eps_rng = make_rng(config.seed, Stream::eps, phase_key);
  const EpsSource eps = normal_eps(eps_rng);

  std::vector<std::size_t> order(count);
  std::vector<std::vector<double>> dense(std::min(config.batch_size, count));
  std::vector<Datapoint> batch;
  batch.reserve(dense.size());

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto shuffle_rng = make_rng(config.seed, Stream::shuffle, phase_key, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double total = 0.0;
    for (std::size_t start = 0; start < count; start += config.batch_size) {
      const std::size_t stop = std::min(count, start + config.batch_size);
      batch.clear();
      for (std::size_t b = start; b < stop; ++b) {
        auto& buf = dense[b - start];
        samples.dense_row_into(order[b], buf);
        batch.push_back(Datapoint{buf, head});
      }
      ElboResult elbo;
      try {
        elbo = elbo_batch(p, batch, model, eps);
      } catch (const NumericError&) {
        throw DivergenceError(std::string(to_string(phase)), epoch);
      }
      total += elbo.value;
      elbo.gradient.scale(1.0 / static_cast<double>(batch.size()));
      auto grads = std::as_const(elbo.gradient).views();
      optimizer.ascend(p.views(), grads);
    }
    const double mean = total / static_cast<double>(count);
    if (!std::isfinite(mean)) throw DivergenceError(std::string(to_string(phase)), epoch);
    result.run.log.push_back({epoch, mean});
  }
  return result;
}

}  // namespace

std::string_view to_string(Phase phase) {
  return phase == Phase::pretrain ? "pretrain" : "refine";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::cvae: return "cvae";
    case Method::fvae: return "fvae";
    case Method::rvae: return "rvae";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "cvae") return Method::cvae;
  if (name == "fvae") return Method::fvae;
  if (name == "rvae") return Method::rvae;
  throw DomainError("unknown method '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  model.validate();
  if (batch_size == 0) throw DomainError("batch size must be >= 1");
  if (!(beta_pre >= 0.0) || !(beta_refine >= 0.0)) throw DomainError("beta must be >= 0");
  if (!(optimizer.learning_rate > 0.0)) throw DomainError("learning rate must be positive");
}

ModelConfig TrainConfig::phase_model(Phase phase) const {
  ModelConfig m = model;
  m.beta = phase == Phase::pretrain ? beta_pre : beta_refine;
  return m;
}

VaeParams initial_params(std::size_t n, const TrainConfig& config) {
  config.validate();
  return VaeParams::init(n, config.model, config.seed);
}

PhaseResult pretrain(const SparseBinaryMatrix& features, const TrainConfig& config) {
  config.validate();
  // Side-information samples are the columns of X, i.e. rows of X^T.
  return run_phase(initial_params(features.rows(), config), features.transpose(),
                   Head::gaussian, Phase::pretrain, config);
}

PhaseResult refine(VaeParams params, const SparseBinaryMatrix& ratings,
                   const TrainConfig& config) {
  config.validate();
  return run_phase(std::move(params), ratings, Head::bernoulli, Phase::refine, config);
}

TrainResult train_cvae(const SparseBinaryMatrix& features, const SparseBinaryMatrix& ratings,
                       const TrainConfig& config) {
  if (features.rows() != ratings.cols())
    throw ShapeError("side information has " + std::to_string(features.rows()) +
                     " items but ratings have " + std::to_string(ratings.cols()));
  auto pre = pretrain(features, config);
  auto ref = refine(std::move(pre.params), ratings, config);
  return {std::move(ref.params), std::move(pre.run), std::move(ref.run)};
}

TrainResult train_method(Method method, const SparseBinaryMatrix& features,
                         const SparseBinaryMatrix& ratings, const TrainConfig& config) {
  switch (method) {
    case Method::cvae:
      return train_cvae(features, ratings, config);
    case Method::fvae: {
      auto pre = pretrain(features, config);
      return {std::move(pre.params), std::move(pre.run), std::nullopt};
    }
    case Method::rvae: {
      auto ref = refine(initial_params(ratings.cols(), config), ratings, config);
      return {std::move(ref.params), std::nullopt, std::move(ref.run)};
    }
  }
  throw DomainError("unknown method");
}

void write_epoch_log(std::ostream& out, const TrainRun& run) {
  char buf[64];
  for (const auto& rec : run.log) {
    std::snprintf(buf, sizeof buf, "%.17g", rec.objective);
    out << rec.epoch << '\t' << buf << '\n';
  }
}

}  // namespace cvae
