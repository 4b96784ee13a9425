#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cvae/mlp.hpp"
#include "cvae/rng.hpp"

namespace cvae {

/// Likelihood attached to a datapoint: rating rows use a Bernoulli over
/// sigmoid(logits), side-information columns a unit-variance Gaussian.
enum class Head { bernoulli, gaussian };

std::string_view to_string(Head head);

struct ModelConfig {
  std::size_t k = 100;
  std::vector<std::size_t> encoder_widths{1000};
  std::vector<std::size_t> decoder_widths{1000};
  /// Weight on positive entries in both likelihoods (>= 1).
  double alpha = 2.0;
  /// Weight on the KL term (>= 0).
  double beta = 1.0;
  /// Monte-Carlo samples of the latent code per datapoint.
  std::size_t samples = 1;

  /// Throws DomainError on k == 0, samples == 0, alpha < 1, beta < 0 or a
  /// zero hidden width.
  void validate() const;
};

/// Shared inference network (n -> widths -> 2k, split into the mean head and
/// the log-variance head) and generation network (k -> widths -> n).
struct VaeParams {
  std::size_t n = 0;
  std::size_t k = 0;
  MlpParams encoder;
  MlpParams decoder;

  static VaeParams init(std::size_t n, const ModelConfig& config, std::uint64_t seed);
  static VaeParams zeros(std::size_t n, const ModelConfig& config);

  std::vector<std::size_t> encoder_hidden_widths() const;
  std::vector<std::size_t> decoder_hidden_widths() const;
  std::size_t parameter_count() const;

  /// Throws ShapeError / NumericError when the invariants do not hold.
  void validate() const;

  /// Encoder views followed by decoder views.
  std::vector<std::span<double>> views();
  std::vector<std::span<const double>> views() const;

  bool operator==(const VaeParams&) const = default;
};

struct VaeGradient {
  GradientBuffer encoder;
  GradientBuffer decoder;

  static VaeGradient zeros_like(const VaeParams& params);
  void set_zero();
  void scale(double factor);
  std::vector<std::span<double>> views();
  std::vector<std::span<const double>> views() const;
  std::vector<double> flatten() const;
};

/// Diagonal Gaussian q(z | x) = N(mu, diag(sigma^2)).
struct LatentGaussian {
  std::vector<double> mu;
  std::vector<double> sigma;
};

/// mu is the mean head; sigma = exp(logvar / 2). Throws NumericError on a
/// non-finite activation.
LatentGaussian encode(const VaeParams& params, std::span<const double> input);

/// z = mu + eps * sigma.
std::vector<double> reparameterize(const LatentGaussian& latent, std::span<const double> eps);

/// Raw generation-network output. Throws NumericError on a non-finite value.
std::vector<double> decode(const VaeParams& params, std::span<const double> z);

/// alpha * sum_{y=1} log sigmoid(f) + sum_{y=0} log(1 - sigmoid(f)), via
/// softplus so it is finite for every finite logit.
double bernoulli_loglik(std::span<const double> y, std::span<const double> logits,
                        double alpha);

/// -(alpha/2) sum_{x=1} (1 - f)^2 - (1/2) sum_{x=0} f^2. The -log(2 pi)/2
/// normalizers are dropped.
double gaussian_loglik(std::span<const double> x, std::span<const double> f, double alpha);

/// KL(N(mu, diag sigma^2) || N(0, I)). Throws DomainError if any sigma <= 0.
double kl_standard_normal(const LatentGaussian& latent);

struct Datapoint {
  std::span<const double> values;
  Head head = Head::bernoulli;
};

/// Fills its argument with standard-normal draws.
using EpsSource = std::function<void(std::span<double>)>;

/// Standard-normal draws from `rng`, which must outlive the source.
EpsSource normal_eps(Rng& rng);

/// Replays `values` in order, wrapping around. Used to freeze noise.
EpsSource replay_eps(std::vector<double> values);

struct ElboResult {
  double value = 0.0;
  VaeGradient gradient;
};

/// Monte-Carlo ELBO summed over the batch,
///   sum_b [ (1/L) sum_l loglik_b(decode(mu_b + eps_bl * sigma_b)) - beta KL_b ],
/// with its gradient (to be ascended) through the reparameterized path.
/// For each datapoint in order, L draws of k values are taken from `eps`.
ElboResult elbo_batch(const VaeParams& params, std::span<const Datapoint> batch,
                      const ModelConfig& config, const EpsSource& eps);

/// Ranking scores for a user: decode(encode(y).mu). No sampling; raw logits.
std::vector<double> predict_scores(const VaeParams& params, std::span<const double> y_row);

}  // namespace cvae
