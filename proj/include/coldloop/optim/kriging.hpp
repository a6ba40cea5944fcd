#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "coldloop/optim/problem.hpp"

namespace coldloop::optim {

struct KrigingOptions {
  double nugget = 1e-8;       // added to the correlation diagonal
  double max_nugget = 1e-4;   // escalate by 10x up to this before giving up
  int restarts = 10;          // multistart count for the likelihood search
  double min_length = 1e-2;   // lengthscale search box
  double max_length = 1e2;
  int max_iterations = 200;   // simplex iterations per restart
  std::uint64_t seed = 1;
};

struct Prediction {
  double mean = 0.0;
  double sd = 0.0;
};

/// Ordinary kriging with a constant trend and a Gaussian correlation
///   R(x, x') = exp(-1/2 sum_k ((x_k - x'_k) / l_k)^2).
class KrigingModel {
 public:
  /// Build with fixed hyperparameters. Throws NumericalError if R + nugget*I is not
  /// positive definite for any nugget up to options.max_nugget.
  KrigingModel(std::vector<Vector> X, Vector y, Vector lengthscales, const KrigingOptions& options = {});

  Prediction predict(const Vector& x) const;
  /// Concentrated log-likelihood: -n/2 ln(sigma^2) - 1/2 ln|R|.
  double log_likelihood() const { return log_likelihood_; }

  double beta() const { return beta_; }
  double sigma2() const { return sigma2_; }
  double nugget() const { return nugget_; }
  const Vector& lengthscales() const { return lengthscales_; }
  const std::vector<Vector>& inputs() const { return X_; }
  const Vector& outputs() const { return y_; }

 private:
  double correlation(const Vector& a, const Vector& b) const;

  std::vector<Vector> X_;
  Vector y_;
  Vector lengthscales_;
  double nugget_ = 0.0;
  double beta_ = 0.0;
  double sigma2_ = 0.0;
  double log_likelihood_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;  // R^-1 (y - beta)
};

/// Fit lengthscales by maximizing the concentrated likelihood (multistart simplex over
/// log lengthscales, starts log-uniform in the search box). Requires n >= dims + 2 and
/// no duplicate rows.
KrigingModel fit_kriging(const std::vector<Vector>& X, const Vector& y, const KrigingOptions& options = {});

/// EI = (f_min - m) Phi(z) + s phi(z), z = (f_min - m) / s; 0 when s = 0.
double expected_improvement(double mean, double sd, double f_min);
double expected_improvement(const KrigingModel& model, const Vector& x, double f_min);

}  // namespace coldloop::optim
