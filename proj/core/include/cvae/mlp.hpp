#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cvae/rng.hpp"

namespace cvae {

/// Row-major matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  bool operator==(const DenseMatrix&) const = default;
};

enum class Activation { tanh };

/// One affine map `out = weight * in + bias`; weight is out x in.
struct Layer {
  DenseMatrix weight;
  std::vector<double> bias;

  std::size_t input_width() const { return weight.cols; }
  std::size_t output_width() const { return weight.rows; }

  bool operator==(const Layer&) const = default;
};

/// Multi-layer perceptron. Hidden layers apply `hidden_activation`, the last
/// layer is affine.
struct MlpParams {
  std::vector<Layer> layers;
  Activation hidden_activation = Activation::tanh;

  /// All-zero network mapping `input_width` through `widths` (last entry is
  /// the output width).
  static MlpParams zeros(std::size_t input_width, std::span<const std::size_t> widths);

  /// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
  static MlpParams init_uniform(std::size_t input_width,
                                std::span<const std::size_t> widths, Rng& rng);

  std::size_t input_width() const;
  std::size_t output_width() const;
  std::size_t parameter_count() const;

  /// Throws ShapeError if layers do not chain and NumericError on NaN/Inf.
  void validate() const;

  /// Every weight matrix and bias vector, in layer order (weight, bias).
  std::vector<std::span<double>> views();
  std::vector<std::span<const double>> views() const;

  bool operator==(const MlpParams&) const = default;
};

/// Partial derivatives shaped like an MlpParams.
struct GradientBuffer {
  std::vector<Layer> layers;

  static GradientBuffer zeros_like(const MlpParams& params);

  void set_zero();
  void add_scaled(const GradientBuffer& other, double scale);
  std::vector<std::span<double>> views();
  std::vector<std::span<const double>> views() const;
  /// Concatenation of views() in order.
  std::vector<double> flatten() const;

  bool operator==(const GradientBuffer&) const = default;
};

/// Activations recorded by a forward pass. `layer_inputs[i]` is the input
/// fed to layer i, so `layer_inputs[0]` is the network input and the rest
/// are the hidden activations.
struct ForwardCache {
  std::vector<std::vector<double>> layer_inputs;
  std::vector<double> output;

  std::span<const std::vector<double>> hidden() const {
    return std::span(layer_inputs).subspan(layer_inputs.empty() ? 0 : 1);
  }
};

ForwardCache mlp_forward(const MlpParams& params, std::span<const double> input);

struct BackwardResult {
  GradientBuffer grads;
  std::vector<double> input_grad;
};

/// Reverse pass for the cotangent `output_grad` at the point recorded in
/// `cache`.
BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            std::span<const double> output_grad);

/// Accumulating variant: adds the parameter gradient into `acc` and returns
/// the input gradient when `want_input_grad`, an empty vector otherwise.
std::vector<double> mlp_backward_into(const MlpParams& params, const ForwardCache& cache,
                                      std::span<const double> output_grad,
                                      GradientBuffer& acc, bool want_input_grad);

}  // namespace cvae
