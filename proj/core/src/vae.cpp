#include "cvae/vae.hpp"

#include <cmath>
#include <string>

#include "cvae/errors.hpp"

namespace cvae {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite ") + what);
}

void check_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ShapeError(std::string(what) + " length " + std::to_string(a) + " vs " +
                     std::to_string(b));
}

std::vector<std::size_t> chain(const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> widths = hidden;
  widths.push_back(out);
  return widths;
}

std::vector<std::size_t> hidden_of(const MlpParams& mlp) {
  std::vector<std::size_t> widths;
  for (std::size_t i = 0; i + 1 < mlp.layers.size(); ++i)
    widths.push_back(mlp.layers[i].output_width());
  return widths;
}

template <typename T, typename A, typename B>
std::vector<T> concat(A a, B b) {
  std::vector<T> out = std::move(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

LatentGaussian split_heads(std::span<const double> head_output, std::size_t k) {
  LatentGaussian lg;
  lg.mu.assign(head_output.begin(), head_output.begin() + static_cast<std::ptrdiff_t>(k));
  lg.sigma.resize(k);
  for (std::size_t j = 0; j < k; ++j) lg.sigma[j] = std::exp(0.5 * head_output[k + j]);
  require_finite(lg.mu, "latent mean");
  require_finite(lg.sigma, "latent scale");
  for (double s : lg.sigma)
    if (!(s > 0.0)) throw NumericError("latent scale underflowed to zero");
  return lg;
}

}  // namespace

std::string_view to_string(Head head) {
  return head == Head::bernoulli ? "bernoulli" : "gaussian";
}

void ModelConfig::validate() const {
  if (k == 0) throw DomainError("latent dimension k must be >= 1");
  if (samples == 0) throw DomainError("Monte-Carlo sample count must be >= 1");
  if (!(alpha >= 1.0)) throw DomainError("alpha must be >= 1");
  if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
  for (auto w : encoder_widths)
    if (w == 0) throw DomainError("encoder hidden width must be >= 1");
  for (auto w : decoder_widths)
    if (w == 0) throw DomainError("decoder hidden width must be >= 1");
}

VaeParams VaeParams::init(std::size_t n, const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  if (n == 0) throw ShapeError("input width n must be >= 1");
  auto rng = make_rng(seed, Stream::init);
  VaeParams p;
  p.n = n;
  p.k = config.k;
  p.encoder = MlpParams::init_uniform(n, chain(config.encoder_widths, 2 * config.k), rng);
  p.decoder = MlpParams::init_uniform(config.k, chain(config.decoder_widths, n), rng);
  return p;
}

VaeParams VaeParams::zeros(std::size_t n, const ModelConfig& config) {
  config.validate();
  VaeParams p;
  p.n = n;
  p.k = config.k;
  p.encoder = MlpParams::zeros(n, chain(config.encoder_widths, 2 * config.k));
  p.decoder = MlpParams::zeros(config.k, chain(config.decoder_widths, n));
  return p;
}

std::vector<std::size_t> VaeParams::encoder_hidden_widths() const { return hidden_of(encoder); }
std::vector<std::size_t> VaeParams::decoder_hidden_widths() const { return hidden_of(decoder); }

std::size_t VaeParams::parameter_count() const {
  return encoder.parameter_count() + decoder.parameter_count();
}

void VaeParams::validate() const {
  encoder.validate();
  decoder.validate();
  if (encoder.input_width() != n) throw ShapeError("encoder input width != n");
  if (decoder.output_width() != n) throw ShapeError("decoder output width != n");
  if (encoder.output_width() != 2 * k) throw ShapeError("encoder heads are not 2k wide");
  if (decoder.input_width() != k) throw ShapeError("decoder input width != k");
}

std::vector<std::span<double>> VaeParams::views() {
  return concat<std::span<double>>(encoder.views(), decoder.views());
}
std::vector<std::span<const double>> VaeParams::views() const {
  return concat<std::span<const double>>(encoder.views(), decoder.views());
}

VaeGradient VaeGradient::zeros_like(const VaeParams& params) {
  return {GradientBuffer::zeros_like(params.encoder), GradientBuffer::zeros_like(params.decoder)};
}

void VaeGradient::set_zero() {
  encoder.set_zero();
  decoder.set_zero();
}

void VaeGradient::scale(double factor) {
  for (auto v : views())
    for (double& x : v) x *= factor;
}

std::vector<std::span<double>> VaeGradient::views() {
  return concat<std::span<double>>(encoder.views(), decoder.views());
}
std::vector<std::span<const double>> VaeGradient::views() const {
  return concat<std::span<const double>>(encoder.views(), decoder.views());
}

std::vector<double> VaeGradient::flatten() const {
  return concat<double>(encoder.flatten(), decoder.flatten());
}

LatentGaussian encode(const VaeParams& params, std::span<const double> input) {
  check_same_length(input.size(), params.n, "encoder input");
  auto cache = mlp_forward(params.encoder, input);
  return split_heads(cache.output, params.k);
}

std::vector<double> reparameterize(const LatentGaussian& latent, std::span<const double> eps) {
  check_same_length(eps.size(), latent.mu.size(), "noise");
  check_same_length(latent.sigma.size(), latent.mu.size(), "latent scale");
  std::vector<double> z(latent.mu.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = latent.mu[j] + eps[j] * latent.sigma[j];
  return z;
}

std::vector<double> decode(const VaeParams& params, std::span<const double> z) {
  check_same_length(z.size(), params.k, "latent code");
  auto out = std::move(mlp_forward(params.decoder, z).output);
  require_finite(out, "decoder output");
  return out;
}

double bernoulli_loglik(std::span<const double> y, std::span<const double> logits,
                        double alpha) {
  check_same_length(y.size(), logits.size(), "Bernoulli target");
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0)
      pos -= softplus(-logits[i]);  // log sigmoid(f)
    else
      neg -= softplus(logits[i]);  // log(1 - sigmoid(f))
  }
  return alpha * pos + neg;
}

double gaussian_loglik(std::span<const double> x, std::span<const double> f, double alpha) {
  check_same_length(x.size(), f.size(), "Gaussian target");
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      const double r = 1.0 - f[i];
      pos += r * r;
    } else {
      neg += f[i] * f[i];
    }
  }
  return -0.5 * alpha * pos - 0.5 * neg;
}

double kl_standard_normal(const LatentGaussian& latent) {
  check_same_length(latent.sigma.size(), latent.mu.size(), "latent scale");
  double sum = 0.0;
  for (std::size_t j = 0; j < latent.mu.size(); ++j) {
    const double s = latent.sigma[j];
    if (!(s > 0.0)) throw DomainError("sigma must be positive");
    const double m = latent.mu[j];
    sum += 1.0 + 2.0 * std::log(s) - m * m - s * s;
  }
  return -0.5 * sum;
}

EpsSource normal_eps(Rng& rng) {
  return [&rng](std::span<double> out) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& e : out) e = normal(rng);
  };
}

EpsSource replay_eps(std::vector<double> values) {
  if (values.empty()) throw DomainError("replay noise buffer is empty");
  return [values = std::move(values), pos = std::size_t{0}](std::span<double> out) mutable {
    for (double& e : out) {
      e = values[pos];
      pos = (pos + 1) % values.size();
    }
  };
}

ElboResult elbo_batch(const VaeParams& params, std::span<const Datapoint> batch,
                      const ModelConfig& config, const EpsSource& eps) {
  config.validate();
  if (batch.empty()) throw DomainError("empty batch");
  const std::size_t k = params.k;
  const std::size_t n = params.n;
  const std::size_t samples = config.samples;
  const double inv_l = 1.0 / static_cast<double>(samples);

  ElboResult result{0.0, VaeGradient::zeros_like(params)};
  std::vector<double> noise(k), z(k), head_grad(2 * k), out_grad(n);

  for (const auto& dp : batch) {
    check_same_length(dp.values.size(), n, "datapoint");
    auto enc = mlp_forward(params.encoder, dp.values);
    const LatentGaussian lg = split_heads(enc.output, k);

    std::fill(head_grad.begin(), head_grad.end(), 0.0);
    double loglik = 0.0;
    for (std::size_t l = 0; l < samples; ++l) {
      eps(noise);
      for (std::size_t j = 0; j < k; ++j) z[j] = lg.mu[j] + noise[j] * lg.sigma[j];
      auto dec = mlp_forward(params.decoder, z);
      const auto& f = dec.output;
      require_finite(f, "decoder output");

      if (dp.head == Head::bernoulli) {
        loglik += bernoulli_loglik(dp.values, f, config.alpha);
        for (std::size_t i = 0; i < n; ++i)
          out_grad[i] = dp.values[i] != 0.0 ? config.alpha * (1.0 - sigmoid(f[i])) * inv_l
                                            : -sigmoid(f[i]) * inv_l;
      } else {
        loglik += gaussian_loglik(dp.values, f, config.alpha);
        for (std::size_t i = 0; i < n; ++i)
          out_grad[i] = dp.values[i] != 0.0 ? config.alpha * (1.0 - f[i]) * inv_l : -f[i] * inv_l;
      }

      auto dz = mlp_backward_into(params.decoder, dec, out_grad, result.gradient.decoder, true);
      // z = mu + eps * exp(logvar / 2)
      for (std::size_t j = 0; j < k; ++j) {
        head_grad[j] += dz[j];
        head_grad[k + j] += dz[j] * noise[j] * 0.5 * lg.sigma[j];
      }
    }

    const double kl = kl_standard_normal(lg);
    // dKL/dmu = mu, dKL/dlogvar = (sigma^2 - 1) / 2
    for (std::size_t j = 0; j < k; ++j) {
      head_grad[j] -= config.beta * lg.mu[j];
      head_grad[k + j] -= config.beta * 0.5 * (lg.sigma[j] * lg.sigma[j] - 1.0);
    }
    mlp_backward_into(params.encoder, enc, head_grad, result.gradient.encoder, false);

    result.value += loglik * inv_l - config.beta * kl;
  }
  if (!std::isfinite(result.value)) throw NumericError("non-finite ELBO");
  return result;
}

std::vector<double> predict_scores(const VaeParams& params, std::span<const double> y_row) {
  return decode(params, encode(params, y_row).mu);
}

}  // namespace cvae
