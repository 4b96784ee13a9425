#include "cvae/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "cvae/errors.hpp"

namespace cvae {

std::vector<double> finite_diff_grad(const std::function<double()>& loss,
                                     std::span<const std::span<double>> params, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  std::vector<double> grad;
  for (auto view : params) {
    for (double& p : view) {
      const double saved = p;
      p = saved + h;
      const double up = loss();
      p = saved - h;
      const double down = loss();
      p = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw NumericError("non-finite loss during finite differencing");
      grad.push_back((up - down) / (2.0 * h));
    }
  }
  return grad;
}

double relative_error(double a, double b, double floor) {
  const double denom = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / denom;
}

double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor) {
  if (a.size() != b.size()) throw ShapeError("gradient vectors differ in length");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, relative_error(a[i], b[i], floor));
  return worst;
}

}  // namespace cvae
