#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <vector>

#include "scopt/conjugate.hpp"
#include "scopt/oracle.hpp"
#include "scopt/scalar.hpp"
#include "scopt/trace.hpp"

namespace scopt {

// Linear minimization min <c,x> over the bounded domain of a nu-barrier,
// followed along the central path grad F(x(t)) = -t c for t from 0 up.
struct PrimalBarrierProblem {
  std::shared_ptr<const BarrierOracle> barrier;
  Eigen::VectorXd c;
  PathConstants consts = PathConstants::barrier_pc();
};

struct PrimalPair {
  double t = 0.0;
  Eigen::VectorXd x;
};

struct PrimalStepInfo {
  double c_norm = 0.0;            // ||c||*_x at the incoming point
  double predictor_lambda = 0.0;  // ||grad F(y) + t+ c||*_y
  double residual = 0.0;          // centering residual of the output
};

// Certificate numerator nu + (beta + sqrt(nu)) beta / (1 - beta); dividing by
// t bounds |<c,x> - <c,x*>| at any t-centered x.
double primal_certificate(double nu, const PathConstants& consts, double t);

// Predictor t+ = t + gamma/||c||*_x along -[hess F]^{-1} c, then one Newton
// corrector on F + t+ <c,.>.  Requires and restores centering at beta;
// t grows by at least the factor 1 + gamma/(beta + sqrt(nu)).
PrimalPair primal_pc_iterate(const PrimalBarrierProblem& prob,
                             const PrimalPair& pair,
                             PrimalStepInfo* info = nullptr);

struct PrimalPcConfig {
  int max_iterations = 100000;
  int centering_iterations = 500;       // budget of the initial centering run
  std::optional<Eigen::VectorXd> x0;    // default: the barrier's center
  double t0 = 0.0;
};

struct PrimalPcResult {
  Eigen::VectorXd x;
  double t = 0.0;
  double certificate = 0.0;  // value at exit, <= eps
  SolveTrace trace;
  std::vector<double> t_sequence;  // path parameter before each iterate
};

// Runs the predictor-corrector path until the certificate drops to eps.
// The start is centered by damped Newton on F when needed.
PrimalPcResult primal_pc_solve(const PrimalBarrierProblem& prob, double eps,
                               const PrimalPcConfig& config = {});

// Linear maximization max -<c,x> over {x in Q : B x = 0} with 0 interior to
// Q, solved through the conjugate potential Phi(u) = F_*(A'u) with
// A = [-c'; B] and the ray b = e_1: following sigma = <b,u> upward drives
// the multiplier t(u) to the optimal value.
struct DualBarrierProblem {
  std::shared_ptr<const BarrierOracle> barrier;  // grad F(0) = 0 required
  Eigen::MatrixXd constraints;                   // B, m x n (m may be 0)
  Eigen::VectorXd c;
  PathConstants consts = PathConstants::barrier_pc();
};

struct DualPair {
  double sigma = 0.0;
  Eigen::VectorXd u;
};

// The potential Phi(u) = F_*(A'u) with its inner solves warm-cached; one
// instance per solve keeps consecutive evaluations cheap.
std::shared_ptr<ConjugateAffineOracle> make_dual_potential(
    const DualBarrierProblem& prob);

// Stacked constraint matrix A = [-c'; B] and the ray b = e_1.
Eigen::MatrixXd dual_stacked_matrix(const DualBarrierProblem& prob);
Eigen::VectorXd dual_ray(const DualBarrierProblem& prob);

// argmin_t ||grad - t b||*: the least-squares multiplier
// <b, H^{-1} grad> / <b, H^{-1} b> in the geometry of H.
double least_squares_multiplier(const LocalGeometry& geom,
                                const Eigen::VectorXd& grad,
                                const Eigen::VectorXd& b);

// t(u) for the dual potential at u.
double dual_t_of_u(const DualBarrierProblem& prob, const Eigen::VectorXd& u);

struct DualCenterInfo {
  double t = 0.0;       // least-squares multiplier t(u)
  double lambda = 0.0;  // ||grad Phi(u) - t(u) b||*_u
  double sigma = 0.0;   // <b,u>
  double b_norm = 0.0;  // ||b||*_u
  double u_norm = 0.0;  // ||u||_u, <= sqrt(nu) on the dual path
};

DualCenterInfo dual_center_info(const DualBarrierProblem& prob,
                                const Eigen::VectorXd& u);

// Certificate numerator nu + 2 beta (1 - beta) sqrt(nu) / (1 - 2 beta);
// dividing by sigma bounds |alpha* - t(u)| at any centered u.
double dual_certificate(double nu, const PathConstants& consts, double sigma);

// Predictor v = u + (gamma/||b||*_u) H^{-1} b, sigma+ = <b,v>, then the
// equality-constrained Newton corrector u+ = v - H(v)^{-1}(grad Phi(v) -
// t(v) b), whose multiplier is exactly t(v).  Requires and restores
// lambda(u) <= beta; sigma grows by at least 1 + gamma/sqrt(nu).
DualPair dual_pc_iterate(const DualBarrierProblem& prob, const DualPair& pair,
                         DualCenterInfo* info = nullptr);

// Nearest point to x(u) = grad F_*(A'u) in its own metric with A x = t(u) b
// exactly: x - [hess F]^{-1} A' [hess Phi]^{-1} (grad Phi - t(u) b).  Its
// distance to x(u) equals lambda(u) <= beta, so it stays interior.
Eigen::VectorXd recover_primal(const DualBarrierProblem& prob,
                               const Eigen::VectorXd& u);

struct DualPcConfig {
  int max_iterations = 100000;
};

struct DualPcResult {
  double alpha = 0.0;          // multiplier estimate t(u) at exit
  Eigen::VectorXd x_feasible;  // recovered interior point with A x = alpha b
  Eigen::VectorXd u;
  double sigma = 0.0;
  double certificate = 0.0;
  SolveTrace trace;
  std::vector<double> sigma_sequence;
};

// Runs the dual predictor-corrector path from (sigma, u) = (0, 0) until the
// certificate drops to eps.
DualPcResult dual_pc_solve(const DualBarrierProblem& prob, double eps,
                           const DualPcConfig& config = {});

}  // namespace scopt
