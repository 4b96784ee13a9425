#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cvae {

/// Central-difference gradient of `loss` with respect to every scalar in
/// `params`. `loss` must read the parameters through the same storage the
/// views point at; each scalar is perturbed in place and restored.
/// Throws NumericError if a perturbed loss is non-finite, DomainError if
/// `h <= 0`.
std::vector<double> finite_diff_grad(const std::function<double()>& loss,
                                     std::span<const std::span<double>> params,
                                     double h = 1e-5);

/// |a - b| / max(|a|, |b|, floor). The floor keeps near-zero partials from
/// dominating through cancellation noise.
double relative_error(double a, double b, double floor = 1e-4);

/// Largest relative_error over two equally sized vectors.
double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor = 1e-4);

}  // namespace cvae
