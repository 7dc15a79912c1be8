#pragma once

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <vector>

#include "scopt/oracle.hpp"
#include "scopt/scalar.hpp"
#include "scopt/trace.hpp"

namespace scopt {

// Point on (or near) the central path of the family
// f_t(x) = f(x) - t <grad f(x0), x>, which connects x0 (t = 1) to the
// minimizer of f (t = 0).
struct CenteredPair {
  double t = 1.0;
  Eigen::VectorXd x;
  double residual = 0.0;  // ||grad f(x) - t grad f(x0)||*_x
  Eigen::VectorXd c;      // -grad f(x0), cached
};

// lambda_{f_t}(x) = ||grad f(x) - t x0_grad||*_x.
double centering_residual(const ScOracle& f, const Eigen::VectorXd& x0_grad,
                          double t, const Eigen::VectorXd& x);

// One path-following iterate: t decreases by gamma/(M ||c||*_x) (clamped at
// zero), then one standard Newton step on f_{t+}.  Output is centered to
// beta/M; a violation means the declared sc constant is wrong.
CenteredPair pfs_iterate(const ScOracle& f, const CenteredPair& pair,
                         const PathConstants& consts);

struct PfsConfig {
  int max_iterations = 200000;
  std::optional<double> quad_finish_tol;  // default 1e-10/M
  std::optional<double> d_bound;          // level-set diameter, report only
};

struct PfsReport {
  SolveTrace trace;
  int path_iterations = 0;  // iterates before t hit 0 or lambda entered Q
  PathConstants constants = PathConstants::pfs();
  double m_f = 1.0;
  double d_bound = std::numeric_limits<double>::quiet_NaN();
  // Aligned per path iterate k = 0..path_iterations: state before step k.
  std::vector<double> t_sequence;         // ends with the final t
  std::vector<double> c_norm_sequence;    // ||c||*_{x_k}
  std::vector<double> f_sequence;         // f(x_k)
  std::vector<double> lambda_f_sequence;  // lambda_f(x_k), unshifted f
};

struct PfsResult {
  Eigen::VectorXd x;
  PfsReport report;
};

PfsResult pfs_solve(const ScOracle& f, const Eigen::VectorXd& x0,
                    const PathConstants& consts = PathConstants::pfs(),
                    const PfsConfig& config = {});

struct PathRateReport {
  bool ok = true;
  int checked = 0;
  double max_violation = 0.0;
};

// t_N <= exp(-gamma (gamma - 2 beta) N^2 / (2 M^2 gap)) for every N whose
// prefix stays outside the quadratic-convergence region.
PathRateReport pfs_rate_check(const PfsReport& report, double f0_minus_fstar);

// t_{N+1} <= (1 - tau (N+1)/gap)^{N+1} with tau = gamma (gamma - 2 beta) /
// (2 M^2), for N+1 < gap/tau.
PathRateReport pfs_superlinear_check(const PfsReport& report,
                                     double f0_minus_fstar);

struct AdaptiveStep {
  CenteredPair pair;
  double gamma_used = 0.0;
  int tries = 0;
};

// Doubling trial: gamma = 2^{1-i} gamma_prev for i = 0, 1, ... until the
// output is centered; never below the admissible floor 0.1125.
AdaptiveStep adaptive_pfs_iterate(const ScOracle& f, const CenteredPair& pair,
                                  double gamma_prev);

}  // namespace scopt
