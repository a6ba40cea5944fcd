#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace coldloop::optim {

using Vector = std::vector<double>;

/// A box-constrained minimization problem as seen by the optimizers.
/// `cost()` is the cumulative number of expensive evaluations (t_p units).
class Problem {
 public:
  virtual ~Problem() = default;
  virtual std::size_t dims() const = 0;
  virtual Vector lower() const = 0;
  virtual Vector upper() const = 0;
  virtual double evaluate(const Vector& x) = 0;
  /// Independent points; results in input order. Default evaluates sequentially.
  virtual std::vector<double> evaluate_batch(const std::vector<Vector>& xs);
  virtual double cost() const = 0;
  /// t_p charged per requested evaluation in optimizer accounting (0 for surrogates).
  virtual double unit_cost() const { return 1.0; }
};

/// Plain function over a box; every call costs one unit.
class FunctionProblem : public Problem {
 public:
  FunctionProblem(std::function<double(const Vector&)> f, Vector lower, Vector upper);
  std::size_t dims() const override { return lower_.size(); }
  Vector lower() const override { return lower_; }
  Vector upper() const override { return upper_; }
  double evaluate(const Vector& x) override;
  double cost() const override { return static_cast<double>(calls_); }
  std::size_t calls() const { return calls_; }

 private:
  std::function<double(const Vector&)> f_;
  Vector lower_, upper_;
  std::size_t calls_ = 0;
};

/// Affine map between the problem box and the unit cube.
Vector to_unit(const Vector& x, const Vector& lower, const Vector& upper);
Vector from_unit(const Vector& u, const Vector& lower, const Vector& upper);

/// Run fn(i) for i in [0, n) on up to `workers` threads. Indices are claimed in order;
/// callers write results by index so the outcome is independent of scheduling.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace coldloop::optim
