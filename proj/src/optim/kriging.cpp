#include "coldloop/optim/kriging.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "coldloop/common.hpp"

namespace coldloop::optim {

namespace {

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd alpha;
  double nugget = 0.0, beta = 0.0, sigma2 = 0.0, log_likelihood = 0.0;
};

// Cholesky of R + nugget I with nugget escalation, then the GLS trend, process
// variance and concentrated log-likelihood.
Factorization factorize(const Eigen::MatrixXd& R, const Eigen::VectorXd& y, const KrigingOptions& options) {
  const Eigen::Index n = R.rows();
  Factorization f;
  f.nugget = options.nugget;
  for (;;) {
    Eigen::MatrixXd Rn = R;
    Rn.diagonal().array() += f.nugget;
    f.llt.compute(Rn);
    if (f.llt.info() == Eigen::Success) break;
    if (f.nugget * 10.0 > options.max_nugget * (1.0 + 1e-12))
      throw NumericalError("kriging correlation matrix is not positive definite even with nugget " +
                           std::to_string(f.nugget));
    f.nugget *= 10.0;
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd Ri1 = f.llt.solve(ones);
  const Eigen::VectorXd Riy = f.llt.solve(y);
  f.beta = ones.dot(Riy) / ones.dot(Ri1);
  f.alpha = Riy - f.beta * Ri1;
  const Eigen::VectorXd resid = y - f.beta * ones;
  f.sigma2 = std::max(resid.dot(f.alpha) / static_cast<double>(n), 0.0);
  const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
  const double s2 = std::max(f.sigma2, std::numeric_limits<double>::min());
  f.log_likelihood = -0.5 * static_cast<double>(n) * std::log(s2) - 0.5 * log_det;
  return f;
}

}  // namespace

KrigingModel::KrigingModel(std::vector<Vector> X, Vector y, Vector lengthscales, const KrigingOptions& options)
    : X_(std::move(X)), y_(std::move(y)), lengthscales_(std::move(lengthscales)) {
  const auto n = static_cast<Eigen::Index>(X_.size());
  if (n == 0 || y_.size() != X_.size()) throw Error("kriging needs matching, non-empty inputs and outputs");
  for (const auto& x : X_)
    if (x.size() != lengthscales_.size()) throw Error("kriging input dimension differs from the lengthscales");
  for (double l : lengthscales_)
    if (!(l > 0.0)) throw Error("kriging lengthscales must be positive");

  Eigen::MatrixXd R(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    R(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) R(i, j) = R(j, i) = correlation(X_[i], X_[j]);
  }
  auto f = factorize(R, Eigen::Map<const Eigen::VectorXd>(y_.data(), n), options);
  llt_ = std::move(f.llt);
  alpha_ = std::move(f.alpha);
  nugget_ = f.nugget;
  beta_ = f.beta;
  sigma2_ = f.sigma2;
  log_likelihood_ = f.log_likelihood;
}

double KrigingModel::correlation(const Vector& a, const Vector& b) const {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) / lengthscales_[k];
    s += d * d;
  }
  return std::exp(-0.5 * s);
}

Prediction KrigingModel::predict(const Vector& x) const {
  const auto n = static_cast<Eigen::Index>(X_.size());
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = correlation(x, X_[i]);
  const double mean = beta_ + r.dot(alpha_);
  // s^2 = sigma^2 (1 - r' R^-1 r); reverts to sigma^2 far from the data.
  const Eigen::VectorXd w = llt_.matrixL().solve(r);
  const double var = sigma2_ * std::max(1.0 - w.squaredNorm(), 0.0);
  return {mean, std::sqrt(var)};
}

namespace {

struct FitContext {
  std::vector<Eigen::MatrixXd> half_d2;  // per dimension: -(x_ik - x_jk)^2 / 2
  Eigen::VectorXd y;
  const KrigingOptions* options;
};

// Negative concentrated log-likelihood over log10 lengthscales, clamped into the search box.
double neg_log_likelihood(const gsl_vector* p, void* params) {
  const auto* ctx = static_cast<const FitContext*>(params);
  const double lo = std::log10(ctx->options->min_length), hi = std::log10(ctx->options->max_length);
  Eigen::ArrayXXd expo = Eigen::ArrayXXd::Zero(ctx->y.size(), ctx->y.size());
  for (std::size_t k = 0; k < p->size; ++k) {
    const double l = std::pow(10.0, std::clamp(gsl_vector_get(p, k), lo, hi));
    expo += ctx->half_d2[k].array() / (l * l);
  }
  try {
    return -factorize(expo.exp().matrix(), ctx->y, *ctx->options).log_likelihood;
  } catch (const NumericalError&) {
    return 1e300;
  }
}

}  // namespace

KrigingModel fit_kriging(const std::vector<Vector>& X, const Vector& y, const KrigingOptions& options) {
  if (X.empty()) throw Error("fit_kriging: no training data");
  const std::size_t d = X.front().size();
  if (X.size() < d + 2) throw Error("fit_kriging: need at least dims + 2 training points");
  if (y.size() != X.size()) throw Error("fit_kriging: inputs and outputs differ in length");
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) dist = std::max(dist, std::abs(X[i][k] - X[j][k]));
      if (dist < 1e-12) throw Error("fit_kriging: duplicate training rows " + std::to_string(j) + " and " +
                                    std::to_string(i));
    }

  const auto n = static_cast<Eigen::Index>(X.size());
  FitContext ctx{{}, Eigen::Map<const Eigen::VectorXd>(y.data(), n), &options};
  for (std::size_t k = 0; k < d; ++k) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double diff = X[static_cast<std::size_t>(i)][k] - X[static_cast<std::size_t>(j)][k];
        m(i, j) = -0.5 * diff * diff;
      }
    ctx.half_d2.push_back(std::move(m));
  }
  gsl_multimin_function fn{&neg_log_likelihood, d, &ctx};
  const double lo = std::log10(options.min_length), hi = std::log10(options.max_length);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> start(lo, hi);

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> p(gsl_vector_alloc(d), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(d), gsl_vector_free);
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d), gsl_multimin_fminimizer_free);
  gsl_vector_set_all(step.get(), 0.5);

  Vector best(d, 0.0);
  double best_f = std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.restarts; ++s) {
    for (std::size_t k = 0; k < d; ++k) gsl_vector_set(p.get(), k, start(rng));
    gsl_multimin_fminimizer_set(nm.get(), &fn, p.get(), step.get());
    for (int it = 0; it < options.max_iterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-4) == GSL_SUCCESS) break;
    }
    const double f = gsl_multimin_fminimizer_minimum(nm.get());
    if (f < best_f) {
      best_f = f;
      const gsl_vector* x = gsl_multimin_fminimizer_x(nm.get());
      for (std::size_t k = 0; k < d; ++k) best[k] = std::clamp(gsl_vector_get(x, k), lo, hi);
    }
  }
  if (!(best_f < 1e300)) throw NumericalError("fit_kriging: no lengthscale gives a positive definite correlation");
  Vector ls(d);
  for (std::size_t k = 0; k < d; ++k) ls[k] = std::pow(10.0, best[k]);
  return KrigingModel(X, y, ls, options);
}

double expected_improvement(double mean, double sd, double f_min) {
  if (!(sd > 0.0)) return 0.0;
  const double z = (f_min - mean) / sd;
  const double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * units::kPi);
  return std::max((f_min - mean) * Phi + sd * phi, 0.0);
}

double expected_improvement(const KrigingModel& model, const Vector& x, double f_min) {
  const auto p = model.predict(x);
  return expected_improvement(p.mean, p.sd, f_min);
}

}  // namespace coldloop::optim
