#include "coldloop/optim/problem.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "coldloop/common.hpp"

namespace coldloop::optim {

std::vector<double> Problem::evaluate_batch(const std::vector<Vector>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(evaluate(x));
  return out;
}

FunctionProblem::FunctionProblem(std::function<double(const Vector&)> f, Vector lower, Vector upper)
    : f_(std::move(f)), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.empty()) throw Error("problem bounds must be non-empty and matching");
  for (std::size_t k = 0; k < lower_.size(); ++k)
    if (!(lower_[k] < upper_[k])) throw Error("problem bounds need lower < upper");
}

double FunctionProblem::evaluate(const Vector& x) {
  ++calls_;
  return f_(x);
}

Vector to_unit(const Vector& x, const Vector& lo, const Vector& hi) {
  Vector u(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) u[k] = (x[k] - lo[k]) / (hi[k] - lo[k]);
  return u;
}

Vector from_unit(const Vector& u, const Vector& lo, const Vector& hi) {
  Vector x(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) x[k] = lo[k] + u[k] * (hi[k] - lo[k]);
  return x;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  // Report the failure with the lowest index so errors do not depend on scheduling.
  std::exception_ptr first_error;
  std::size_t first_index = n;
  std::mutex error_mutex;
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t t = std::min(workers, n);
  for (std::size_t k = 0; k < t; ++k) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace coldloop::optim
