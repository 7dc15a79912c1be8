#include "scopt/linops.hpp"

#include <cmath>

namespace scopt {

SpdMatrix::SpdMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw DimensionError("SpdMatrix: matrix must be square and nonempty");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw InvalidProblemError("SpdMatrix: matrix is not symmetric");
  // Work with the exact symmetrization so downstream factorizations are
  // insensitive to sub-tolerance asymmetry.
  m_ = ((m_ + m_.transpose()) / 2.0).eval();
}

LocalGeometry::LocalGeometry(const SpdMatrix& h) : h_(h.matrix()) {
  // Factor the Jacobi-equilibrated matrix D^-1 H D^-1 with D = diag(H)^1/2.
  // Its unit diagonal keeps the factorization alive when the entries of H
  // span many orders of magnitude; H = (D Lhat)(D Lhat)' recovers the
  // original factor exactly.
  if (!(h_.diagonal().minCoeff() > 0.0))
    throw SingularHessianError("LocalGeometry: Hessian is not positive definite");
  scale_ = h_.diagonal().cwiseSqrt();
  const Eigen::VectorXd inv = scale_.cwiseInverse();
  llt_.compute(inv.asDiagonal() * h_ * inv.asDiagonal());
  if (llt_.info() != Eigen::Success)
    throw SingularHessianError("LocalGeometry: Hessian is not positive definite");
  const auto diag = llt_.matrixLLT().diagonal();
  const double smax = scale_.maxCoeff() * diag.maxCoeff();
  const double smin = scale_.minCoeff() * diag.minCoeff();
  // The spread of diag(D Lhat)^2 estimates the condition number from below.
  ill_conditioned_ = !(smin > 0.0) || (smax / smin) * (smax / smin) >= 1e12;
}

double LocalGeometry::primal_norm(const Eigen::VectorXd& h) const {
  if (h.size() != h_.rows())
    throw DimensionError("primal_norm: vector dimension mismatch");
  const double q = h.dot(h_ * h);
  return std::sqrt(std::max(q, 0.0));
}

double LocalGeometry::dual_norm(const Eigen::VectorXd& s) const {
  if (s.size() != h_.rows())
    throw DimensionError("dual_norm: covector dimension mismatch");
  // <s, H^{-1} s> = ||L^{-1} s||^2 with L = D Lhat.
  return llt_.matrixL().solve(s.cwiseQuotient(scale_)).norm();
}

Eigen::VectorXd LocalGeometry::solve(const Eigen::VectorXd& s) const {
  if (s.size() != h_.rows())
    throw DimensionError("solve_direction: covector dimension mismatch");
  auto back_solve = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return llt_.solve(r.cwiseQuotient(scale_)).cwiseQuotient(scale_);
  };
  Eigen::VectorXd d = back_solve(s);
  d += back_solve(s - h_ * d);
  return d;
}

Eigen::MatrixXd LocalGeometry::solve(const Eigen::MatrixXd& s) const {
  if (s.rows() != h_.rows())
    throw DimensionError("solve_direction: matrix dimension mismatch");
  const Eigen::VectorXd inv = scale_.cwiseInverse();
  auto back_solve = [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd {
    return inv.asDiagonal() * llt_.solve(inv.asDiagonal() * r);
  };
  Eigen::MatrixXd d = back_solve(s);
  d += back_solve(s - h_ * d);
  return d;
}

}  // namespace scopt
