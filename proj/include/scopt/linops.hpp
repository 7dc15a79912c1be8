#pragma once

#include <Eigen/Dense>

#include "scopt/errors.hpp"

namespace scopt {

// Dense symmetric positive-definite matrix. Symmetry is validated on
// construction (relative 1e-12); positive definiteness is established by the
// Cholesky factorization inside LocalGeometry.
class SpdMatrix {
 public:
  explicit SpdMatrix(Eigen::MatrixXd m);
  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

// Cached Cholesky factorization of a Hessian. Provides the local norm
// ||h||_x = <Hh,h>^{1/2}, its dual ||s||*_x = <s,H^{-1}s>^{1/2}, and Newton
// directions H^{-1}s. Immutable after construction; safe to share across
// threads.
class LocalGeometry {
 public:
  explicit LocalGeometry(const SpdMatrix& h);
  explicit LocalGeometry(Eigen::MatrixXd h) : LocalGeometry(SpdMatrix(std::move(h))) {}

  int dim() const { return static_cast<int>(h_.rows()); }
  const Eigen::MatrixXd& hessian() const { return h_; }

  // Set when the Cholesky diagonal spread suggests a condition number of
  // about 1e12 or worse; results may carry amplified rounding error.
  bool ill_conditioned() const { return ill_conditioned_; }

  double primal_norm(const Eigen::VectorXd& h) const;
  double dual_norm(const Eigen::VectorXd& s) const;
  // Solves H d = s with one step of iterative refinement.
  Eigen::VectorXd solve(const Eigen::VectorXd& s) const;
  // Columnwise H D = S.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& s) const;

 private:
  Eigen::MatrixXd h_;
  Eigen::VectorXd scale_;  // diag(H)^1/2; the factorization holds D^-1 H D^-1
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool ill_conditioned_ = false;
};

inline double primal_norm(const LocalGeometry& g, const Eigen::VectorXd& h) {
  return g.primal_norm(h);
}
inline double dual_norm(const LocalGeometry& g, const Eigen::VectorXd& s) {
  return g.dual_norm(s);
}
inline Eigen::VectorXd solve_direction(const LocalGeometry& g, const Eigen::VectorXd& s) {
  return g.solve(s);
}

}  // namespace scopt
