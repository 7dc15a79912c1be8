#include "scopt/barrier_methods.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "scopt/errors.hpp"
#include "scopt/pathfollow.hpp"

namespace scopt {

namespace {

// ||grad F(x) + t c||*_x, the centering residual of F + t <c,.>.
double barrier_centering_residual(const BarrierOracle& barrier,
                                  const Eigen::VectorXd& c, double t,
                                  const Eigen::VectorXd& x) {
  return centering_residual(barrier, -c, t, x);
}

constexpr double kResidualSlack = 1.0 + 1e-9;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void require_barrier_pc(const PathConstants& consts) {
  if (consts.variant != PathVariant::BarrierPc) {
    throw InvalidProblemError(
        "barrier path-following needs BarrierPc constants");
  }
  ConstantsReport report = validate_constants(consts);
  if (!report.ok) {
    throw InvalidProblemError("inadmissible (beta, gamma): " +
                              report.violations.front());
  }
}

void require_vector_dim(const Eigen::VectorXd& v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim) {
    throw DimensionError(std::string(what) + " has wrong dimension");
  }
}

// Damped Newton run on the bare barrier until ||grad F||*_x <= target.
Eigen::VectorXd center_on_barrier(const BarrierOracle& barrier,
                                  Eigen::VectorXd x, double target,
                                  int max_iterations, SolveTrace* trace,
                                  std::chrono::steady_clock::time_point t0) {
  for (int k = 0; k < max_iterations; ++k) {
    ScOracle::Eval eval = barrier.eval(x);
    LocalGeometry geom{eval.hess};
    double lambda = geom.dual_norm(eval.grad);
    if (trace != nullptr) {
      TraceRow row;
      row.iter = static_cast<int>(trace->rows.size());
      row.phase = "center";
      row.f = eval.value;
      row.lambda = lambda;
      row.wall_s = seconds_since(t0);
      trace->rows.push_back(std::move(row));
    }
    if (lambda <= target) return x;
    Eigen::VectorXd step = geom.solve(eval.grad) / (1.0 + lambda);
    Eigen::VectorXd next = x - step;
    if (!barrier.in_domain(next)) {
      throw DomainError(
          "centering step left the domain; the barrier is likely not "
          "self-concordant");
    }
    x = std::move(next);
  }
  throw IterationLimitError("initial centering did not reach the target");
}

}  // namespace

double primal_certificate(double nu, const PathConstants& consts, double t) {
  if (t <= 0.0) return std::numeric_limits<double>::infinity();
  double beta = consts.beta;
  return (nu + (beta + std::sqrt(nu)) * beta / (1.0 - beta)) / t;
}

PrimalPair primal_pc_iterate(const PrimalBarrierProblem& prob,
                             const PrimalPair& pair, PrimalStepInfo* info) {
  require_barrier_pc(prob.consts);
  const BarrierOracle& barrier = *prob.barrier;
  require_vector_dim(prob.c, barrier.dim(), "objective covector");
  require_vector_dim(pair.x, barrier.dim(), "iterate");
  if (pair.t < 0.0) throw InvalidProblemError("path parameter must be >= 0");

  ScOracle::Eval eval = barrier.eval(pair.x);
  LocalGeometry geom{eval.hess};
  double residual_in = geom.dual_norm(eval.grad + pair.t * prob.c);
  if (residual_in > prob.consts.beta * kResidualSlack) {
    throw CenteringError("input pair is not centered");
  }
  double c_norm = geom.dual_norm(prob.c);
  if (!(c_norm > 0.0)) {
    throw InvalidProblemError("objective covector is zero in the local norm");
  }

  double tau = prob.consts.gamma / c_norm;
  double t_next = pair.t + tau;
  Eigen::VectorXd y = pair.x - tau * geom.solve(prob.c);
  if (!barrier.in_domain(y)) {
    throw DomainError(
        "predictor left the domain; the declared nu or the barrier property "
        "is likely wrong");
  }

  ScOracle::Eval eval_y = barrier.eval(y);
  LocalGeometry geom_y{eval_y.hess};
  Eigen::VectorXd shifted = eval_y.grad + t_next * prob.c;
  Eigen::VectorXd x_next = y - geom_y.solve(shifted);
  if (!barrier.in_domain(x_next)) {
    throw DomainError(
        "corrector left the domain; the declared nu or the barrier property "
        "is likely wrong");
  }

  double residual_out =
      barrier_centering_residual(barrier, prob.c, t_next, x_next);
  if (residual_out > prob.consts.beta * kResidualSlack) {
    throw CenteringError(
        "corrector failed to restore centering; the barrier is likely not "
        "self-concordant");
  }
  if (info != nullptr) {
    info->c_norm = c_norm;
    info->predictor_lambda = geom_y.dual_norm(shifted);
    info->residual = residual_out;
  }
  return {t_next, std::move(x_next)};
}

PrimalPcResult primal_pc_solve(const PrimalBarrierProblem& prob, double eps,
                               const PrimalPcConfig& config) {
  require_barrier_pc(prob.consts);
  if (!(eps > 0.0)) throw InvalidProblemError("eps must be positive");
  const BarrierOracle& barrier = *prob.barrier;
  require_vector_dim(prob.c, barrier.dim(), "objective covector");

  auto clock_start = std::chrono::steady_clock::now();
  PrimalPcResult result;
  result.trace.method = "primal-pc";

  Eigen::VectorXd x;
  if (config.x0.has_value()) {
    x = *config.x0;
    require_vector_dim(x, barrier.dim(), "start point");
  } else if (barrier.has_analytic_center()) {
    x = barrier.analytic_center();
  } else {
    throw InvalidProblemError(
        "no start point given and the barrier has no known center");
  }
  if (!barrier.in_domain(x)) throw DomainError("start point is infeasible");

  double beta = prob.consts.beta;
  if (newton_decrement(barrier, x) > beta) {
    x = center_on_barrier(barrier, std::move(x), 0.5 * beta,
                          config.centering_iterations, &result.trace,
                          clock_start);
  }

  double t = config.t0;
  if (t < 0.0) throw InvalidProblemError("t0 must be >= 0");
  if (barrier_centering_residual(barrier, prob.c, t, x) >
      beta * kResidualSlack) {
    throw CenteringError("start pair (t0, x0) is not centered");
  }

  double nu = barrier.nu();
  PrimalPair pair{t, std::move(x)};
  for (int k = 0; k <= config.max_iterations; ++k) {
    double cert = primal_certificate(nu, prob.consts, pair.t);
    result.t_sequence.push_back(pair.t);
    {
      TraceRow row;
      row.iter = static_cast<int>(result.trace.rows.size());
      row.phase = "path";
      row.f = prob.c.dot(pair.x);
      row.lambda = barrier_centering_residual(barrier, prob.c, pair.t,
                                               pair.x);
      row.residual = row.lambda;
      row.t = pair.t;
      row.wall_s = seconds_since(clock_start);
      result.trace.rows.push_back(std::move(row));
    }
    if (cert <= eps) {
      result.x = pair.x;
      result.t = pair.t;
      result.certificate = cert;
      result.trace.status = "optimal";
      result.trace.rows.back().phase = "done";
      return result;
    }
    if (k == config.max_iterations) break;
    PrimalStepInfo info;
    PrimalPair next = primal_pc_iterate(prob, pair, &info);
    result.trace.rows.back().step_norm = info.c_norm > 0.0
                                             ? prob.consts.gamma / info.c_norm
                                             : 0.0;
    pair = std::move(next);
  }
  throw IterationLimitError("certificate did not reach eps within the cap");
}

std::shared_ptr<ConjugateAffineOracle> make_dual_potential(
    const DualBarrierProblem& prob) {
  const BarrierOracle& barrier = *prob.barrier;
  int n = barrier.dim();
  require_vector_dim(prob.c, n, "objective covector");
  if (prob.constraints.size() > 0 &&
      static_cast<int>(prob.constraints.cols()) != n) {
    throw DimensionError("constraint matrix has wrong column count");
  }
  Eigen::MatrixXd a = dual_stacked_matrix(prob);
  if (a.rows() > a.cols()) {
    throw InvalidProblemError("more stacked constraints than variables");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  if (qr.rank() < a.rows()) {
    throw InvalidProblemError("stacked constraint matrix is row-rank "
                              "deficient");
  }
  if (!barrier.in_domain(Eigen::VectorXd::Zero(n))) {
    throw InvalidProblemError("zero must be interior to the domain");
  }
  return std::make_shared<ConjugateAffineOracle>(
      prob.barrier, a.transpose(), Eigen::VectorXd::Zero(n),
      Eigen::VectorXd::Zero(n));
}

Eigen::MatrixXd dual_stacked_matrix(const DualBarrierProblem& prob) {
  int n = static_cast<int>(prob.c.size());
  int m = static_cast<int>(prob.constraints.rows());
  Eigen::MatrixXd a(m + 1, n);
  a.row(0) = -prob.c.transpose();
  if (m > 0) a.bottomRows(m) = prob.constraints;
  return a;
}

Eigen::VectorXd dual_ray(const DualBarrierProblem& prob) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(prob.constraints.rows() + 1);
  b(0) = 1.0;
  return b;
}

double least_squares_multiplier(const LocalGeometry& geom,
                                const Eigen::VectorXd& grad,
                                const Eigen::VectorXd& b) {
  Eigen::VectorXd hb = geom.solve(b);
  double denom = b.dot(hb);
  if (!(denom > 0.0)) {
    throw SingularHessianError("ray has zero length in the dual norm");
  }
  return grad.dot(hb) / denom;
}

namespace {

struct DualContext {
  std::shared_ptr<ConjugateAffineOracle> phi;
  Eigen::VectorXd b;
};

DualContext make_context(const DualBarrierProblem& prob) {
  return {make_dual_potential(prob), dual_ray(prob)};
}

DualCenterInfo center_info(const DualContext& ctx, const LocalGeometry& geom,
                           const Eigen::VectorXd& grad,
                           const Eigen::VectorXd& u) {
  DualCenterInfo info;
  info.t = least_squares_multiplier(geom, grad, ctx.b);
  info.lambda = geom.dual_norm(grad - info.t * ctx.b);
  info.sigma = ctx.b.dot(u);
  info.b_norm = geom.dual_norm(ctx.b);
  info.u_norm = geom.primal_norm(u);
  return info;
}

DualPair iterate_on_context(const DualContext& ctx,
                            const PathConstants& consts, const DualPair& pair,
                            DualCenterInfo* info) {
  const ConjugateAffineOracle& phi = *ctx.phi;
  ScOracle::Eval eval = phi.eval(pair.u);
  LocalGeometry geom{eval.hess};
  DualCenterInfo at_u = center_info(ctx, geom, eval.grad, pair.u);
  if (at_u.lambda > consts.beta * kResidualSlack) {
    throw CenteringError("input point is not centered for the dual path");
  }

  Eigen::VectorXd v =
      pair.u + (consts.gamma / at_u.b_norm) * geom.solve(ctx.b);
  if (!phi.in_domain(v)) {
    throw DomainError("dual predictor left the conjugate domain");
  }
  double sigma_next = ctx.b.dot(v);

  ScOracle::Eval eval_v = phi.eval(v);
  LocalGeometry geom_v{eval_v.hess};
  double t_v = least_squares_multiplier(geom_v, eval_v.grad, ctx.b);
  const Eigen::VectorXd centering_dir = eval_v.grad - t_v * ctx.b;
  Eigen::VectorXd u_next = v - geom_v.solve(centering_dir);
  if (!phi.in_domain(u_next)) {
    throw DomainError("dual corrector left the conjugate domain");
  }

  ScOracle::Eval eval_next = phi.eval(u_next);
  LocalGeometry geom_next{eval_next.hess};
  DualCenterInfo at_next = center_info(ctx, geom_next, eval_next.grad, u_next);
  if (at_next.lambda > consts.beta * kResidualSlack) {
    throw CenteringError(
        "dual corrector failed to restore centering; the barrier or nu is "
        "likely wrong");
  }
  if (info != nullptr) *info = at_next;
  return {sigma_next, std::move(u_next)};
}

}  // namespace

double dual_t_of_u(const DualBarrierProblem& prob, const Eigen::VectorXd& u) {
  DualContext ctx = make_context(prob);
  ScOracle::Eval eval = ctx.phi->eval(u);
  LocalGeometry geom{eval.hess};
  return least_squares_multiplier(geom, eval.grad, ctx.b);
}

DualCenterInfo dual_center_info(const DualBarrierProblem& prob,
                                const Eigen::VectorXd& u) {
  DualContext ctx = make_context(prob);
  ScOracle::Eval eval = ctx.phi->eval(u);
  LocalGeometry geom{eval.hess};
  return center_info(ctx, geom, eval.grad, u);
}

double dual_certificate(double nu, const PathConstants& consts, double sigma) {
  if (sigma <= 0.0) return std::numeric_limits<double>::infinity();
  double beta = consts.beta;
  return (nu + 2.0 * beta * (1.0 - beta) / (1.0 - 2.0 * beta) * std::sqrt(nu)) /
         sigma;
}

DualPair dual_pc_iterate(const DualBarrierProblem& prob, const DualPair& pair,
                         DualCenterInfo* info) {
  require_barrier_pc(prob.consts);
  DualContext ctx = make_context(prob);
  require_vector_dim(pair.u, static_cast<int>(ctx.b.size()), "dual iterate");
  return iterate_on_context(ctx, prob.consts, pair, info);
}

Eigen::VectorXd recover_primal(const DualBarrierProblem& prob,
                               const Eigen::VectorXd& u) {
  DualContext ctx = make_context(prob);
  require_vector_dim(u, static_cast<int>(ctx.b.size()), "dual point");
  const ConjugateAffineOracle& phi = *ctx.phi;
  ScOracle::Eval eval = phi.eval(u);
  LocalGeometry geom{eval.hess};
  DualCenterInfo info = center_info(ctx, geom, eval.grad, u);
  if (info.lambda > prob.consts.beta * kResidualSlack) {
    throw CenteringError("dual point is not centered; recovery needs "
                         "lambda(u) <= beta");
  }
  const Eigen::VectorXd path_resid = eval.grad - info.t * ctx.b;
  Eigen::VectorXd w = geom.solve(path_resid);
  Eigen::VectorXd x_u = phi.primal_point(u);
  Eigen::MatrixXd a = dual_stacked_matrix(prob);
  LocalGeometry barrier_geom = geometry_at(*prob.barrier, x_u);
  const Eigen::VectorXd pulled_back = a.transpose() * w;
  return x_u - barrier_geom.solve(pulled_back);
}

DualPcResult dual_pc_solve(const DualBarrierProblem& prob, double eps,
                           const DualPcConfig& config) {
  require_barrier_pc(prob.consts);
  if (!(eps > 0.0)) throw InvalidProblemError("eps must be positive");
  DualContext ctx = make_context(prob);
  double nu = prob.barrier->nu();

  auto clock_start = std::chrono::steady_clock::now();
  DualPcResult result;
  result.trace.method = "dual-pc";

  DualPair pair{0.0, Eigen::VectorXd::Zero(ctx.b.size())};
  ScOracle::Eval eval0 = ctx.phi->eval(pair.u);
  LocalGeometry geom0{eval0.hess};
  DualCenterInfo info = center_info(ctx, geom0, eval0.grad, pair.u);
  if (info.lambda > prob.consts.beta) {
    throw InvalidProblemError(
        "the barrier gradient at zero must vanish for the zero dual start");
  }

  for (int k = 0; k <= config.max_iterations; ++k) {
    double cert = dual_certificate(nu, prob.consts, pair.sigma);
    result.sigma_sequence.push_back(pair.sigma);
    {
      TraceRow row;
      row.iter = static_cast<int>(result.trace.rows.size());
      row.phase = "path";
      row.f = info.t;
      row.lambda = info.lambda;
      row.residual = info.lambda;
      row.t = pair.sigma;
      row.wall_s = seconds_since(clock_start);
      result.trace.rows.push_back(std::move(row));
    }
    if (cert <= eps) {
      result.alpha = info.t;
      result.u = pair.u;
      result.sigma = pair.sigma;
      result.certificate = cert;
      result.x_feasible = recover_primal(prob, pair.u);
      result.trace.status = "optimal";
      result.trace.rows.back().phase = "done";
      return result;
    }
    if (k == config.max_iterations) break;
    DualPair next = iterate_on_context(ctx, prob.consts, pair, &info);
    result.trace.rows.back().step_norm = (next.u - pair.u).norm();
    pair = std::move(next);
  }
  throw IterationLimitError("certificate did not reach eps within the cap");
}

}  // namespace scopt
