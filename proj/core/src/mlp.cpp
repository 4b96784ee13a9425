#include "cvae/mlp.hpp"

#include <cmath>
#include <string>

#include "cvae/errors.hpp"

namespace cvae {

namespace {

std::string dims(std::size_t a, std::size_t b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

template <typename LayerRange>
std::vector<std::span<double>> layer_views(LayerRange& layers) {
  std::vector<std::span<double>> out;
  out.reserve(layers.size() * 2);
  for (auto& layer : layers) {
    out.emplace_back(layer.weight.data);
    out.emplace_back(layer.bias);
  }
  return out;
}

template <typename LayerRange>
std::vector<std::span<const double>> layer_views_const(const LayerRange& layers) {
  std::vector<std::span<const double>> out;
  out.reserve(layers.size() * 2);
  for (const auto& layer : layers) {
    out.emplace_back(layer.weight.data);
    out.emplace_back(layer.bias);
  }
  return out;
}

// out = W x + b, skipping zero inputs (rating rows and feature columns are
// mostly zeros).
void affine(const Layer& layer, std::span<const double> x, std::vector<double>& out) {
  const std::size_t rows = layer.weight.rows;
  const std::size_t cols = layer.weight.cols;
  out.assign(layer.bias.begin(), layer.bias.end());

  std::vector<std::size_t> nz;
  nz.reserve(cols);
  for (std::size_t j = 0; j < cols; ++j)
    if (x[j] != 0.0) nz.push_back(j);

  const double* w = layer.weight.data.data();
  if (nz.size() * 2 < cols) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* wr = w + r * cols;
      double acc = 0.0;
      for (std::size_t j : nz) acc += wr[j] * x[j];
      out[r] += acc;
    }
  } else {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* wr = w + r * cols;
      double acc = 0.0;
      for (std::size_t j = 0; j < cols; ++j) acc += wr[j] * x[j];
      out[r] += acc;
    }
  }
}

}  // namespace

MlpParams MlpParams::zeros(std::size_t input_width, std::span<const std::size_t> widths) {
  MlpParams p;
  std::size_t in = input_width;
  for (std::size_t out : widths) {
    p.layers.push_back(Layer{DenseMatrix(out, in), std::vector<double>(out, 0.0)});
    in = out;
  }
  return p;
}

MlpParams MlpParams::init_uniform(std::size_t input_width,
                                  std::span<const std::size_t> widths, Rng& rng) {
  MlpParams p = zeros(input_width, widths);
  for (auto& layer : p.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.input_width()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : layer.weight.data) w = dist(rng);
  }
  return p;
}

std::size_t MlpParams::input_width() const {
  return layers.empty() ? 0 : layers.front().input_width();
}

std::size_t MlpParams::output_width() const {
  return layers.empty() ? 0 : layers.back().output_width();
}

std::size_t MlpParams::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.weight.data.size() + l.bias.size();
  return total;
}

void MlpParams::validate() const {
  if (layers.empty()) throw ShapeError("MLP has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.weight.data.size() != l.weight.rows * l.weight.cols)
      throw ShapeError("layer " + std::to_string(i) + " weight storage mismatch");
    if (l.bias.size() != l.weight.rows)
      throw ShapeError("layer " + std::to_string(i) + " bias width " +
                       dims(l.bias.size(), l.weight.rows));
    if (i > 0 && layers[i - 1].output_width() != l.input_width())
      throw ShapeError("layer " + std::to_string(i) + " does not chain: " +
                       dims(layers[i - 1].output_width(), l.input_width()));
  }
  for (auto v : views())
    for (double x : v)
      if (!std::isfinite(x)) throw NumericError("non-finite MLP parameter");
}

std::vector<std::span<double>> MlpParams::views() { return layer_views(layers); }
std::vector<std::span<const double>> MlpParams::views() const {
  return layer_views_const(layers);
}

GradientBuffer GradientBuffer::zeros_like(const MlpParams& params) {
  GradientBuffer g;
  g.layers.reserve(params.layers.size());
  for (const auto& l : params.layers)
    g.layers.push_back(Layer{DenseMatrix(l.weight.rows, l.weight.cols),
                             std::vector<double>(l.bias.size(), 0.0)});
  return g;
}

void GradientBuffer::set_zero() {
  for (auto v : views()) std::fill(v.begin(), v.end(), 0.0);
}

void GradientBuffer::add_scaled(const GradientBuffer& other, double scale) {
  auto dst = views();
  auto src = other.views();
  if (dst.size() != src.size()) throw ShapeError("gradient buffers differ in layer count");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i].size() != src[i].size()) throw ShapeError("gradient buffers differ in shape");
    for (std::size_t j = 0; j < dst[i].size(); ++j) dst[i][j] += scale * src[i][j];
  }
}

std::vector<std::span<double>> GradientBuffer::views() { return layer_views(layers); }
std::vector<std::span<const double>> GradientBuffer::views() const {
  return layer_views_const(layers);
}

std::vector<double> GradientBuffer::flatten() const {
  std::vector<double> out;
  for (auto v : views()) out.insert(out.end(), v.begin(), v.end());
  return out;
}

ForwardCache mlp_forward(const MlpParams& params, std::span<const double> input) {
  if (params.layers.empty()) throw ShapeError("MLP has no layers");
  if (input.size() != params.input_width())
    throw ShapeError("MLP input width " + dims(input.size(), params.input_width()));

  ForwardCache cache;
  cache.layer_inputs.reserve(params.layers.size());
  cache.layer_inputs.emplace_back(input.begin(), input.end());

  std::vector<double> out;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const Layer& layer = params.layers[i];
    if (layer.input_width() != cache.layer_inputs.back().size())
      throw ShapeError("layer " + std::to_string(i) + " does not chain");
    affine(layer, cache.layer_inputs.back(), out);
    if (i + 1 < params.layers.size()) {
      for (double& v : out) v = std::tanh(v);
      cache.layer_inputs.push_back(std::move(out));
      out = {};
    }
  }
  cache.output = std::move(out);
  return cache;
}

std::vector<double> mlp_backward_into(const MlpParams& params, const ForwardCache& cache,
                                      std::span<const double> output_grad,
                                      GradientBuffer& acc, bool want_input_grad) {
  const std::size_t depth = params.layers.size();
  if (cache.layer_inputs.size() != depth)
    throw ShapeError("forward cache does not match network depth");
  if (output_grad.size() != params.output_width())
    throw ShapeError("output gradient width " + dims(output_grad.size(), params.output_width()));
  if (acc.layers.size() != depth) throw ShapeError("gradient buffer depth mismatch");

  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> prev;
  for (std::size_t li = depth; li-- > 0;) {
    const Layer& layer = params.layers[li];
    Layer& g = acc.layers[li];
    const auto& x = cache.layer_inputs[li];
    const std::size_t rows = layer.weight.rows;
    const std::size_t cols = layer.weight.cols;
    if (x.size() != cols || g.weight.rows != rows || g.weight.cols != cols)
      throw ShapeError("layer " + std::to_string(li) + " shape mismatch in backward pass");

    std::vector<std::size_t> nz;
    nz.reserve(cols);
    for (std::size_t j = 0; j < cols; ++j)
      if (x[j] != 0.0) nz.push_back(j);

    for (std::size_t r = 0; r < rows; ++r) {
      const double d = delta[r];
      g.bias[r] += d;
      if (d == 0.0) continue;
      double* gr = g.weight.data.data() + r * cols;
      for (std::size_t j : nz) gr[j] += d * x[j];
    }

    const bool need_prev = li > 0 || want_input_grad;
    if (!need_prev) break;
    prev.assign(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = delta[r];
      if (d == 0.0) continue;
      const double* wr = layer.weight.data.data() + r * cols;
      for (std::size_t j = 0; j < cols; ++j) prev[j] += wr[j] * d;
    }
    if (li > 0) {
      // x holds tanh activations of layer li-1
      for (std::size_t j = 0; j < cols; ++j) prev[j] *= 1.0 - x[j] * x[j];
    }
    delta.swap(prev);
  }
  if (!want_input_grad) return {};
  return delta;
}

BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            std::span<const double> output_grad) {
  BackwardResult result{GradientBuffer::zeros_like(params), {}};
  result.input_grad = mlp_backward_into(params, cache, output_grad, result.grads, true);
  return result;
}

}  // namespace cvae
