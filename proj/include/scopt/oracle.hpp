#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "scopt/linops.hpp"

namespace scopt {

// Second-order oracle for a self-concordant function: |D3f(x)[h,h,h]| is
// bounded by 2 * sc_constant() * (h' Hess(x) h)^{3/2} everywhere on the open
// convex domain reported by in_domain().
class ScOracle {
 public:
  struct Eval {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
  };

  virtual ~ScOracle() = default;

  virtual int dim() const = 0;
  virtual double sc_constant() const = 0;
  virtual bool in_domain(const Eigen::VectorXd& x) const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const = 0;

  // One-shot evaluation; overridden by oracles whose three parts share work.
  virtual Eval eval(const Eigen::VectorXd& x) const;
};

// Self-concordant barrier with finite parameter nu: <grad, h>^2 <= nu * h'Hh.
// Barriers here are standard (sc_constant() == 1).
class BarrierOracle : public ScOracle {
 public:
  double sc_constant() const override { return 1.0; }
  virtual double nu() const = 0;
  virtual bool has_analytic_center() const { return false; }
  virtual Eigen::VectorXd analytic_center() const;
};

// Local geometry of the oracle at x; throws DomainError outside the domain.
LocalGeometry geometry_at(const ScOracle& f, const Eigen::VectorXd& x);

// Newton decrement lambda_f(x) = dual local norm of the gradient.
double newton_decrement(const ScOracle& f, const Eigen::VectorXd& x);
double newton_decrement(const ScOracle& f, const Eigen::VectorXd& x,
                        const LocalGeometry& geom);

// f + <shift, x> * weight; linear terms leave the sc constant unchanged.
std::shared_ptr<ScOracle> shifted_oracle(std::shared_ptr<const ScOracle> f,
                                         Eigen::VectorXd shift,
                                         double weight = 1.0);

// M^2 * f, the standard (M=1) rescaling; decrements scale as M * lambda.
std::shared_ptr<ScOracle> normalize_to_standard(
    std::shared_ptr<const ScOracle> f);

// f restricted to the affine set {x0 + N w} with orthonormal columns N; the
// restriction keeps the sc constant of f.
class AffineRestrictedOracle final : public ScOracle {
 public:
  AffineRestrictedOracle(std::shared_ptr<const ScOracle> base,
                         Eigen::VectorXd x0, Eigen::MatrixXd basis);

  int dim() const override;
  double sc_constant() const override;
  bool in_domain(const Eigen::VectorXd& w) const override;
  double value(const Eigen::VectorXd& w) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& w) const override;
  Eval eval(const Eigen::VectorXd& w) const override;

  Eigen::VectorXd embed(const Eigen::VectorXd& w) const;
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::VectorXd& origin() const { return x0_; }

 private:
  std::shared_ptr<const ScOracle> base_;
  Eigen::VectorXd x0_;
  Eigen::MatrixXd basis_;
};

// Orthonormal basis of ker(A) (columns); empty (n x 0) when A has full
// column rank.
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& a);

// Any solution of A x = b; throws InvalidProblemError when none exists.
Eigen::VectorXd particular_solution(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b);

// Finite-difference audit of the self-concordance declaration: samples
// directions at the given points and compares the third derivative along h
// (central difference of the Hessian quadratic form) against
// 2 * sc_constant() * ||h||_x^3.
struct AuditReport {
  bool ok = true;
  int checked = 0;
  double worst_ratio = 0.0;     // max |D3| / (2 M ||h||^3), <= 1+tol when ok
  std::string worst_location;
};

AuditReport audit_self_concordance(const ScOracle& f,
                                   const std::vector<Eigen::VectorXd>& points,
                                   int directions_per_point,
                                   std::uint64_t seed, double tol,
                                   double fd_scale = 1e-4);

}  // namespace scopt
