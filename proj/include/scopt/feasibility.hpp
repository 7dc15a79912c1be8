#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scopt/oracle.hpp"
#include "scopt/trace.hpp"

namespace scopt {

// Find x in Q with A x = b, posed as barrier minimization over the affine
// manifold and solved through its dual.  The barrier must be anchored:
// grad F(0) = 0 and F(0) = 0, so that y = 0 starts the dual at its
// unconstrained minimum.
struct FeasibilityInstance {
  std::shared_ptr<const BarrierOracle> barrier;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  // Feasibility depth: the largest delta with (1-delta)Q still meeting the
  // manifold; the dual initial gap is at most nu ln(1/depth).
  std::optional<double> eps_depth;
};

// G(w) = F(center + w) - F(center): the same barrier with the origin moved
// to the given interior point, anchored when the point is the analytic
// center.
std::shared_ptr<const BarrierOracle> recentered_barrier(
    std::shared_ptr<const BarrierOracle> barrier, Eigen::VectorXd center);

// G(x) = F(x / shrink): the barrier of the shrunken set (shrink in (0, 1]),
// with the same nu and the same anchor.
std::shared_ptr<const BarrierOracle> scaled_domain_barrier(
    std::shared_ptr<const BarrierOracle> barrier, double shrink);

enum class FeasibilitySolver { Dnm, Pfs };

struct FeasibilityConfig {
  double residual_tol = 1e-8;   // on ||A x(y) - b||
  double gradient_tol = 1e-8;   // on the dual decrement
  // Stop on the constraint residual alone; needed when the manifold touches
  // Q only at its boundary (the dual then has no finite minimizer and the
  // decrement never vanishes, while x(y) still converges to a solution).
  bool residual_only = false;
  int max_iterations = 200000;
};

struct FeasibilityResult {
  Eigen::VectorXd x;          // recovered point grad F_*(A'y)
  Eigen::VectorXd y;          // dual argument at exit
  double residual = 0.0;      // ||A x - b||
  double dual_lambda = 0.0;   // dual decrement at exit
  double dual_value = 0.0;    // Phi(y) - <b,y> at exit; its drop from 0
                              // equals the initial dual gap when solved out
  SolveTrace trace;
};

// Minimizes Phi(y) - <b,y> with Phi(u) = F_*(A'u) from y = 0 by damped
// Newton or by path-following, recovering x = grad F_*(A'y).  Throws
// IterationLimitError when the stopping rule is not met within the cap
// (in particular when the instance is infeasible beyond its depth).
FeasibilityResult feasibility_via_dual(const FeasibilityInstance& inst,
                                       FeasibilitySolver solver,
                                       const FeasibilityConfig& config = {});

struct DualExactConfig {
  // Outer stop: on the path, grad Phi(y) = t b with t rising to 1 exactly
  // at the dual optimum; stop once t >= 1 - multiplier_tol.
  double multiplier_tol = 1e-3;
  double inner_tol = 1e-10;  // constrained decrement of the inner solves
  int max_outer = 100000;
  int max_inner = 500;
};

struct DualExactResult {
  Eigen::VectorXd y;
  Eigen::VectorXd x;       // grad F_*(A'y) at exit
  double sigma = 0.0;
  double multiplier = 0.0;
  double residual = 0.0;   // ||A x - b||
  SolveTrace trace;
  std::vector<double> sigma_sequence;       // grows by >= 1 + gamma/sqrt(nu)
  std::vector<double> multiplier_sequence;
};

// Follows sigma = <b,y> upward: sigma+ = sigma + gamma ||b||*_y, then an
// equality-constrained Newton solve of min{Phi : <b,y> = sigma+} to the
// inner tolerance.  Any gamma > 0 is admissible.
DualExactResult dual_pathfollow_exact(const FeasibilityInstance& inst,
                                      double gamma,
                                      const DualExactConfig& config = {});

// Homogeneous self-dual embedding of the LP pair
//   min <c,x> s.t. A x = b, x >= 0   /   max <b,y> s.t. A'y + s = c, s >= 0
// as a feasibility problem on the simplex-interior set in dimension 2n.
struct SelfDualEmbedding {
  Eigen::MatrixXd q_matrix;   // (n+1) x (2n+1) over z = (x, s, tau)
  Eigen::MatrixXd reduced_a;  // the first 2n columns minus (last column) e'
  Eigen::VectorXd reduced_b;  // minus the last column
  // Normal-form bookkeeping: row_transform * A, with columns taken in
  // col_permutation order, equals (I_m, B).
  Eigen::MatrixXd row_transform;
  Eigen::VectorXi col_permutation;  // original index of each permuted column
  Eigen::VectorXd c_permuted;
  Eigen::VectorXd b_transformed;
  // The program as given, kept for recovery-time verification.
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  int n = 0;
  int m = 0;
};

// Requires full row rank; the error message lists a dependent row set
// otherwise.
SelfDualEmbedding lp_to_feasibility(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& c);

// The embedding as a solvable instance: simplex-interior barrier recentered
// at its analytic center.  Solutions have complementary zero coordinates,
// so the manifold only touches the boundary: solve with residual_only.
FeasibilityInstance embedding_instance(const SelfDualEmbedding& emb);

struct LpRecovery {
  Eigen::VectorXd x;  // primal solution, original column order
  Eigen::VectorXd s;  // dual slacks, original column order
  Eigen::VectorXd y;  // dual multipliers of the original constraints
  double tau = 0.0;
  double gap = 0.0;       // <c,x> - <b,y>
  bool polished = false;  // true when the crossover refinement verified
};

// Maps a recentered solution w of the embedding instance back through the
// simplex center, the homogenizing tau, the row transform, and the column
// permutation.  Throws when tau is (numerically) zero, which signals an
// infeasible or unbounded LP pair.  When the point is near-optimal, a
// crossover onto the support detected by x vs s comparison is attempted;
// the refined pair replaces the raw one only after verifying primal and
// dual feasibility and a gap no worse than before.
LpRecovery recover_lp_solution(const SelfDualEmbedding& emb,
                               const Eigen::VectorXd& w);

struct StrategyRow {
  std::string solver;      // "dnm", "pfs", "dual-exact"
  int iterations = 0;
  double predicted = 0.0;  // nu ln(1/eps), sqrt(nu ln(1/eps)), or
                           // sqrt(nu) ln(nu/eps); NaN without a known depth
  double residual = 0.0;
};

struct StrategyReport {
  double nu = 0.0;
  double eps = 0.0;  // NaN when the instance has no known depth
  std::vector<StrategyRow> rows;
};

// Runs all three dual strategies on the instance and tabulates iteration
// counts against their predicted orders.
StrategyReport strategy_comparison(const FeasibilityInstance& inst,
                                   double dual_gamma = 0.5,
                                   const FeasibilityConfig& config = {});

// The depth by bisection over delta, each trial solving the dual of the
// shrunken instance.  Emptiness is decided by the decrement: a dual with no
// finite minimizer keeps its decrement >= 1 everywhere, so a dip below one
// certifies the trial set nonempty.
double feasibility_depth(const FeasibilityInstance& inst, double tol = 1e-3);

}  // namespace scopt
