#pragma once

#include <Eigen/Core>
#include <optional>

#include "scopt/oracle.hpp"
#include "scopt/trace.hpp"

namespace scopt {

struct NewtonConfig {
  int max_iterations = 100000;
  // Damped phase runs until lambda <= target_lambda; default 1/(2M), the
  // quadratic-convergence region.
  std::optional<double> target_lambda;
  // Pure Newton then polishes to this decrement; default 1e-10/M (absolute
  // 1e-10 when M = 0).
  std::optional<double> quad_finish_tol;
};

// x - H^{-1} g; the iterate may leave the domain when the declared sc
// constant is wrong, reported via DomainError.
Eigen::VectorXd standard_newton_step(const ScOracle& f,
                                     const Eigen::VectorXd& x);

// x - H^{-1} g / (1 + M lambda); stays in the domain for a correct M.
Eigen::VectorXd damped_newton_step(const ScOracle& f, const Eigen::VectorXd& x);

struct DnmResult {
  Eigen::VectorXd x;
  SolveTrace trace;
  int damped_iterations = 0;  // steps taken before the pure-Newton switch
};

DnmResult dnm_solve(const ScOracle& f, const Eigen::VectorXd& x0,
                    const NewtonConfig& config = {});

// Per-iteration check of the gap recursion
//   M^2 gap_{k+1} <= M^2 gap_k - omega(omega_star_inverse(M^2 gap_k))
// over trace rows with M lambda <= 1.
struct SuperlinearReport {
  bool ok = true;
  int checked = 0;
  double max_violation = 0.0;  // positive means the bound failed by this much
};

SuperlinearReport superlinear_bound_check(const SolveTrace& trace, double m_f,
                                          double f_star);

}  // namespace scopt
