#pragma once

#include <array>
#include <span>
#include <vector>

namespace coldloop::md {

/// Natural cubic spline through samples on a uniform grid x_k = x0 + k*dx.
/// Outside the grid the spline continues linearly with its end slope, so
/// value and first derivative stay continuous everywhere.
class UniformSpline {
 public:
  UniformSpline() = default;
  UniformSpline(double x0, double dx, std::span<const double> values);

  double value(double x) const;
  double derivative(double x) const;
  /// Value and derivative in one lookup.
  void evaluate(double x, double& value, double& derivative) const;

  double x0() const { return x0_; }
  double dx() const { return dx_; }
  std::size_t size() const { return coeffs_.size() + 1; }
  /// Per-interval polynomial coefficients a + b t + c t^2 + d t^3, t in [0, 1].
  const std::vector<std::array<double, 4>>& coefficients() const { return coeffs_; }

 private:
  double x0_ = 0.0;
  double dx_ = 1.0;
  double inv_dx_ = 1.0;
  // Per interval: a + b t + c t^2 + d t^3 with t in [0, 1].
  std::vector<std::array<double, 4>> coeffs_;
};

}  // namespace coldloop::md
