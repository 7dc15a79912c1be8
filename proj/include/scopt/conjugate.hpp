#pragma once

#include <Eigen/Core>
#include <memory>
#include <mutex>

#include "scopt/oracle.hpp"

namespace scopt {

// Fenchel conjugate f_*(s) = sup_x { <s,x> - f(x) } of a self-concordant f,
// evaluated through an inner Newton solve of grad f(x) = s.  The conjugate
// of an M-self-concordant function is M-self-concordant; its gradient is the
// maximizer x(s) and its Hessian is the inverse primal Hessian at x(s).
class ConjugateOracle final : public ScOracle {
 public:
  ConjugateOracle(std::shared_ptr<const ScOracle> primal,
                  Eigen::VectorXd inner_start, double inner_tol = 1e-12);

  int dim() const override;
  double sc_constant() const override;
  bool in_domain(const Eigen::VectorXd& s) const override;
  double value(const Eigen::VectorXd& s) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& s) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& s) const override;
  Eval eval(const Eigen::VectorXd& s) const override;

  // The maximizer x(s); equals gradient(s).
  Eigen::VectorXd primal_point(const Eigen::VectorXd& s) const;

 private:
  std::shared_ptr<const ScOracle> primal_;
  Eigen::VectorXd inner_start_;
  double inner_tol_;
  // Warm-start cache; guarded so concurrent evaluation stays safe.
  mutable std::mutex cache_mutex_;
  mutable Eigen::VectorXd cached_s_;
  mutable Eigen::VectorXd cached_x_;
};

// Phi(u) = f_*(lin u + offset); the affine substitution keeps the sc
// constant.  gradient = lin' x(s), hessian = lin' [hess f(x(s))]^{-1} lin.
class ConjugateAffineOracle final : public ScOracle {
 public:
  ConjugateAffineOracle(std::shared_ptr<const ScOracle> primal,
                        Eigen::MatrixXd lin, Eigen::VectorXd offset,
                        Eigen::VectorXd inner_start, double inner_tol = 1e-12);

  int dim() const override;
  double sc_constant() const override;
  bool in_domain(const Eigen::VectorXd& u) const override;
  double value(const Eigen::VectorXd& u) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const override;
  Eval eval(const Eigen::VectorXd& u) const override;

  Eigen::VectorXd primal_point(const Eigen::VectorXd& u) const;
  Eigen::VectorXd dual_argument(const Eigen::VectorXd& u) const;

 private:
  std::shared_ptr<const ScOracle> primal_;
  Eigen::MatrixXd lin_;
  Eigen::VectorXd offset_;
  Eigen::VectorXd inner_start_;
  double inner_tol_;
  mutable std::mutex cache_mutex_;
  mutable Eigen::VectorXd cached_u_;
  mutable Eigen::VectorXd cached_x_;
};

// Solves grad f(x) = s to decrement tolerance tol by damped Newton from
// start; throws DomainError when start is infeasible, IterationLimitError
// when the target is outside the conjugate domain or tol is unreachable.
Eigen::VectorXd solve_gradient_equation(const ScOracle& f,
                                        const Eigen::VectorXd& s,
                                        const Eigen::VectorXd& start,
                                        double tol, int max_iterations = 500);

}  // namespace scopt
