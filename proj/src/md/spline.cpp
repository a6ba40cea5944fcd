#include "coldloop/md/spline.hpp"

#include <cmath>

#include "coldloop/common.hpp"

namespace coldloop::md {

UniformSpline::UniformSpline(double x0, double dx, std::span<const double> y)
    : x0_(x0), dx_(dx), inv_dx_(1.0 / dx) {
  const std::size_t n = y.size();
  if (n < 2) throw Error("spline needs at least two samples");
  if (!(dx > 0.0)) throw Error("spline spacing must be positive");

  // Second derivatives with M_0 = M_{n-1} = 0 (natural ends); Thomas algorithm
  // on M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2.
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    const std::size_t k = n - 2;
    std::vector<double> cp(k), dp(k);
    const double s = 6.0 / (dx * dx);
    for (std::size_t i = 0; i < k; ++i) {
      const double rhs = s * (y[i + 2] - 2.0 * y[i + 1] + y[i]);
      const double denom = 4.0 - (i > 0 ? cp[i - 1] : 0.0);
      cp[i] = 1.0 / denom;
      dp[i] = (rhs - (i > 0 ? dp[i - 1] : 0.0)) / denom;
    }
    m[k] = dp[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) m[i + 1] = dp[i] - cp[i] * m[i + 2];
  }

  const double h2 = dx * dx;
  coeffs_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    coeffs_[i] = {y[i], (y[i + 1] - y[i]) - h2 / 6.0 * (2.0 * m[i] + m[i + 1]), 0.5 * h2 * m[i],
                  h2 / 6.0 * (m[i + 1] - m[i])};
  }
}

void UniformSpline::evaluate(double x, double& value, double& deriv) const {
  const double u = (x - x0_) * inv_dx_;
  const auto last = static_cast<double>(coeffs_.size());
  if (u < 0.0) {
    const auto& c = coeffs_.front();
    deriv = c[1] * inv_dx_;
    value = c[0] + c[1] * u;
    return;
  }
  if (u >= last) {
    const auto& c = coeffs_.back();
    const double end = c[0] + c[1] + c[2] + c[3];
    deriv = (c[1] + 2.0 * c[2] + 3.0 * c[3]) * inv_dx_;
    value = end + (c[1] + 2.0 * c[2] + 3.0 * c[3]) * (u - last);
    return;
  }
  const auto i = static_cast<std::size_t>(u);
  const double t = u - static_cast<double>(i);
  const auto& c = coeffs_[i];
  value = c[0] + t * (c[1] + t * (c[2] + t * c[3]));
  deriv = (c[1] + t * (2.0 * c[2] + t * 3.0 * c[3])) * inv_dx_;
}

double UniformSpline::value(double x) const {
  double v, d;
  evaluate(x, v, d);
  return v;
}

double UniformSpline::derivative(double x) const {
  double v, d;
  evaluate(x, v, d);
  return d;
}

}  // namespace coldloop::md
