#include "scopt/conjugate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>

#include "scopt/errors.hpp"

namespace scopt {

Eigen::VectorXd solve_gradient_equation(const ScOracle& f,
                                        const Eigen::VectorXd& s,
                                        const Eigen::VectorXd& start,
                                        double tol, int max_iterations) {
  if (s.size() != f.dim() || start.size() != f.dim()) {
    throw DimensionError("gradient equation shapes do not match oracle");
  }
  if (!f.in_domain(start)) {
    throw DomainError("gradient equation start is outside the domain");
  }
  const double m = f.sc_constant();
  Eigen::VectorXd x = start;
  // In the quadratic phase each step at least halves the decrement, so a
  // repeated failure to halve at a tiny decrement is the floating-point
  // floor of this target's scaling, not lack of convergence.
  double best_lambda = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < max_iterations; ++it) {
    const LocalGeometry geom = geometry_at(f, x);
    const Eigen::VectorXd residual = f.gradient(x) - s;
    const double lambda = geom.dual_norm(residual);
    if (lambda <= tol) {
      return x;
    }
    if (lambda <= 0.5 * best_lambda) {
      stalled = 0;
    } else if (lambda <= 1e-8 && ++stalled >= 3) {
      return x;
    }
    best_lambda = std::min(best_lambda, lambda);
    const Eigen::VectorXd direction = geom.solve(residual);
    // Damped steps stay in the domain for any decrement; pure Newton is used
    // only deep inside the quadratic region.
    const double damp =
        m * lambda > 0.25 ? 1.0 / (1.0 + m * lambda) : 1.0;
    x -= damp * direction;
    if (!f.in_domain(x)) {
      throw IterationLimitError(
          "gradient equation iterate left the domain; the target is likely "
          "outside the conjugate domain");
    }
  }
  throw IterationLimitError("gradient equation solve did not converge");
}

ConjugateOracle::ConjugateOracle(std::shared_ptr<const ScOracle> primal,
                                 Eigen::VectorXd inner_start, double inner_tol)
    : primal_(std::move(primal)),
      inner_start_(std::move(inner_start)),
      inner_tol_(inner_tol) {
  if (inner_start_.size() != primal_->dim()) {
    throw DimensionError("conjugate inner start has wrong dimension");
  }
  if (!primal_->in_domain(inner_start_)) {
    throw DomainError("conjugate inner start is outside the primal domain");
  }
}

int ConjugateOracle::dim() const { return primal_->dim(); }

double ConjugateOracle::sc_constant() const { return primal_->sc_constant(); }

Eigen::VectorXd ConjugateOracle::primal_point(const Eigen::VectorXd& s) const {
  Eigen::VectorXd start = inner_start_;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cached_s_.size() == s.size() && cached_s_ == s) {
      return cached_x_;
    }
    if (cached_x_.size() == s.size() && primal_->in_domain(cached_x_)) {
      start = cached_x_;
    }
  }
  Eigen::VectorXd x;
  try {
    x = solve_gradient_equation(*primal_, s, start, inner_tol_);
  } catch (const IterationLimitError&) {
    if (start == inner_start_) {
      throw;
    }
    x = solve_gradient_equation(*primal_, s, inner_start_, inner_tol_);
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  cached_s_ = s;
  cached_x_ = x;
  return x;
}

bool ConjugateOracle::in_domain(const Eigen::VectorXd& s) const {
  try {
    primal_point(s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

double ConjugateOracle::value(const Eigen::VectorXd& s) const {
  const Eigen::VectorXd x = primal_point(s);
  return s.dot(x) - primal_->value(x);
}

Eigen::VectorXd ConjugateOracle::gradient(const Eigen::VectorXd& s) const {
  return primal_point(s);
}

Eigen::MatrixXd ConjugateOracle::hessian(const Eigen::VectorXd& s) const {
  const Eigen::VectorXd x = primal_point(s);
  const LocalGeometry geom = geometry_at(*primal_, x);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim(), dim());
  return geom.solve(eye);
}

ScOracle::Eval ConjugateOracle::eval(const Eigen::VectorXd& s) const {
  Eval e;
  const Eigen::VectorXd x = primal_point(s);
  e.value = s.dot(x) - primal_->value(x);
  e.grad = x;
  const LocalGeometry geom = geometry_at(*primal_, x);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim(), dim());
  e.hess = geom.solve(eye);
  return e;
}

ConjugateAffineOracle::ConjugateAffineOracle(
    std::shared_ptr<const ScOracle> primal, Eigen::MatrixXd lin,
    Eigen::VectorXd offset, Eigen::VectorXd inner_start, double inner_tol)
    : primal_(std::move(primal)),
      lin_(std::move(lin)),
      offset_(std::move(offset)),
      inner_start_(std::move(inner_start)),
      inner_tol_(inner_tol) {
  if (lin_.rows() != primal_->dim() || offset_.size() != primal_->dim() ||
      inner_start_.size() != primal_->dim()) {
    throw DimensionError("conjugate affine shapes do not match oracle");
  }
  if (!primal_->in_domain(inner_start_)) {
    throw DomainError("conjugate inner start is outside the primal domain");
  }
}

int ConjugateAffineOracle::dim() const {
  return static_cast<int>(lin_.cols());
}

double ConjugateAffineOracle::sc_constant() const {
  return primal_->sc_constant();
}

Eigen::VectorXd ConjugateAffineOracle::dual_argument(
    const Eigen::VectorXd& u) const {
  if (u.size() != lin_.cols()) {
    throw DimensionError("conjugate affine point has wrong dimension");
  }
  return lin_ * u + offset_;
}

Eigen::VectorXd ConjugateAffineOracle::primal_point(
    const Eigen::VectorXd& u) const {
  const Eigen::VectorXd s = dual_argument(u);
  Eigen::VectorXd start = inner_start_;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cached_u_.size() == u.size() && cached_u_ == u) {
      return cached_x_;
    }
    if (cached_x_.size() == primal_->dim() && primal_->in_domain(cached_x_)) {
      start = cached_x_;
    }
  }
  Eigen::VectorXd x;
  try {
    x = solve_gradient_equation(*primal_, s, start, inner_tol_);
  } catch (const IterationLimitError&) {
    if (start == inner_start_) {
      throw;
    }
    x = solve_gradient_equation(*primal_, s, inner_start_, inner_tol_);
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  cached_u_ = u;
  cached_x_ = x;
  return x;
}

bool ConjugateAffineOracle::in_domain(const Eigen::VectorXd& u) const {
  try {
    primal_point(u);
    return true;
  } catch (const Error&) {
    return false;
  }
}

double ConjugateAffineOracle::value(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd x = primal_point(u);
  return dual_argument(u).dot(x) - primal_->value(x);
}

Eigen::VectorXd ConjugateAffineOracle::gradient(
    const Eigen::VectorXd& u) const {
  return lin_.transpose() * primal_point(u);
}

Eigen::MatrixXd ConjugateAffineOracle::hessian(
    const Eigen::VectorXd& u) const {
  const Eigen::VectorXd x = primal_point(u);
  const LocalGeometry geom = geometry_at(*primal_, x);
  return lin_.transpose() * geom.solve(lin_);
}

ScOracle::Eval ConjugateAffineOracle::eval(const Eigen::VectorXd& u) const {
  Eval e;
  const Eigen::VectorXd x = primal_point(u);
  e.value = dual_argument(u).dot(x) - primal_->value(x);
  e.grad = lin_.transpose() * x;
  const LocalGeometry geom = geometry_at(*primal_, x);
  e.hess = lin_.transpose() * geom.solve(lin_);
  return e;
}

}  // namespace scopt
