#include "scopt/feasibility.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

#include "scopt/barrier_methods.hpp"
#include "scopt/conjugate.hpp"
#include "scopt/errors.hpp"
#include "scopt/pathfollow.hpp"
#include "scopt/zoo.hpp"

namespace scopt {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

class RecenteredBarrier final : public BarrierOracle {
 public:
  RecenteredBarrier(std::shared_ptr<const BarrierOracle> base,
                    Eigen::VectorXd center)
      : base_(std::move(base)),
        center_(std::move(center)),
        offset_(base_->value(center_)) {}

  int dim() const override { return base_->dim(); }
  double nu() const override { return base_->nu(); }
  bool has_analytic_center() const override { return true; }
  Eigen::VectorXd analytic_center() const override {
    return Eigen::VectorXd::Zero(dim());
  }
  bool in_domain(const Eigen::VectorXd& x) const override {
    return base_->in_domain(center_ + x);
  }
  double value(const Eigen::VectorXd& x) const override {
    return base_->value(center_ + x) - offset_;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return base_->gradient(center_ + x);
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    return base_->hessian(center_ + x);
  }
  Eval eval(const Eigen::VectorXd& x) const override {
    Eval e = base_->eval(center_ + x);
    e.value -= offset_;
    return e;
  }

 private:
  std::shared_ptr<const BarrierOracle> base_;
  Eigen::VectorXd center_;
  double offset_;
};

class ScaledDomainBarrier final : public BarrierOracle {
 public:
  ScaledDomainBarrier(std::shared_ptr<const BarrierOracle> base, double shrink)
      : base_(std::move(base)), shrink_(shrink) {
    if (!(shrink > 0.0) || shrink > 1.0) {
      throw InvalidProblemError("shrink factor must lie in (0, 1]");
    }
  }

  int dim() const override { return base_->dim(); }
  double nu() const override { return base_->nu(); }
  bool has_analytic_center() const override {
    return base_->has_analytic_center();
  }
  Eigen::VectorXd analytic_center() const override {
    return shrink_ * base_->analytic_center();
  }
  bool in_domain(const Eigen::VectorXd& x) const override {
    return base_->in_domain(x / shrink_);
  }
  double value(const Eigen::VectorXd& x) const override {
    return base_->value(x / shrink_);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return base_->gradient(x / shrink_) / shrink_;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    return base_->hessian(x / shrink_) / (shrink_ * shrink_);
  }
  Eval eval(const Eigen::VectorXd& x) const override {
    Eval e = base_->eval(x / shrink_);
    e.grad /= shrink_;
    e.hess /= shrink_ * shrink_;
    return e;
  }

 private:
  std::shared_ptr<const BarrierOracle> base_;
  double shrink_;
};

void require_anchored(const BarrierOracle& barrier) {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(barrier.dim());
  if (!barrier.in_domain(zero)) {
    throw InvalidProblemError("zero must be interior to the barrier domain");
  }
  if (std::abs(barrier.value(zero)) > 1e-8) {
    throw InvalidProblemError("the barrier must vanish at zero");
  }
  if (newton_decrement(barrier, zero) > 1e-6) {
    throw InvalidProblemError(
        "the barrier gradient must vanish at zero (anchor at the analytic "
        "center first)");
  }
}

void require_instance_shapes(const FeasibilityInstance& inst) {
  if (!inst.barrier) throw InvalidProblemError("instance has no barrier");
  if (static_cast<int>(inst.a.cols()) != inst.barrier->dim()) {
    throw DimensionError("constraint matrix has wrong column count");
  }
  if (inst.a.rows() != inst.b.size()) {
    throw DimensionError("constraint right-hand side has wrong dimension");
  }
}

struct DualObjective {
  std::shared_ptr<ConjugateAffineOracle> phi;
  std::shared_ptr<ScOracle> phi_tilde;  // Phi(y) - <b,y>
};

DualObjective make_dual_objective(const FeasibilityInstance& inst) {
  require_instance_shapes(inst);
  require_anchored(*inst.barrier);
  int n = inst.barrier->dim();
  auto phi = std::make_shared<ConjugateAffineOracle>(
      inst.barrier, inst.a.transpose(), Eigen::VectorXd::Zero(n),
      Eigen::VectorXd::Zero(n));
  auto phi_tilde = shifted_oracle(phi, -inst.b);
  return {std::move(phi), std::move(phi_tilde)};
}

}  // namespace

std::shared_ptr<const BarrierOracle> recentered_barrier(
    std::shared_ptr<const BarrierOracle> barrier, Eigen::VectorXd center) {
  if (!barrier->in_domain(center)) {
    throw DomainError("recentering point is not interior");
  }
  return std::make_shared<RecenteredBarrier>(std::move(barrier),
                                             std::move(center));
}

std::shared_ptr<const BarrierOracle> scaled_domain_barrier(
    std::shared_ptr<const BarrierOracle> barrier, double shrink) {
  return std::make_shared<ScaledDomainBarrier>(std::move(barrier), shrink);
}

FeasibilityResult feasibility_via_dual(const FeasibilityInstance& inst,
                                       FeasibilitySolver solver,
                                       const FeasibilityConfig& config) {
  DualObjective dual = make_dual_objective(inst);
  auto clock_start = std::chrono::steady_clock::now();

  FeasibilityResult result;
  result.trace.method =
      solver == FeasibilitySolver::Dnm ? "feas-dnm" : "feas-pfs";

  Eigen::VectorXd y = Eigen::VectorXd::Zero(inst.a.rows());
  int iterations_used = 0;

  auto record =
      [&](const std::string& phase, double value, double lambda,
          double residual, double t, double step_norm) {
        TraceRow row;
        row.iter = static_cast<int>(result.trace.rows.size());
        row.phase = phase;
        row.f = value;
        row.lambda = lambda;
        row.residual = residual;
        row.t = t;
        row.step_norm = step_norm;
        row.wall_s = seconds_since(clock_start);
        result.trace.rows.push_back(std::move(row));
      };

  auto finish = [&](Eigen::VectorXd x, double residual, double lambda,
                    double value) {
    result.x = std::move(x);
    result.y = y;
    result.residual = residual;
    result.dual_lambda = lambda;
    result.dual_value = value;
    result.trace.status = "feasible";
    return result;
  };

  auto stop_met = [&](double residual, double lambda) {
    return residual <= config.residual_tol &&
           (config.residual_only || lambda <= config.gradient_tol);
  };

  // Path-following phase; entered only for the Pfs strategy, runs while the
  // decrement stays large and the path parameter is positive.
  if (solver == FeasibilitySolver::Pfs) {
    Eigen::VectorXd c = -dual.phi_tilde->gradient(y);
    CenteredPair pair{1.0, y, 0.0, c};
    while (iterations_used <= config.max_iterations) {
      ScOracle::Eval eval = dual.phi_tilde->eval(pair.x);
      LocalGeometry geom{eval.hess};
      double lambda = geom.dual_norm(eval.grad);
      Eigen::VectorXd x = dual.phi->primal_point(pair.x);
      double residual = (inst.a * x - inst.b).norm();
      record("path", eval.value, lambda, residual, pair.t, 0.0);
      if (stop_met(residual, lambda)) {
        y = pair.x;
        return finish(std::move(x), residual, lambda, eval.value);
      }
      if (pair.t <= 0.0 || lambda <= 0.5) break;
      pair = pfs_iterate(*dual.phi_tilde, pair, PathConstants::pfs());
      ++iterations_used;
    }
    y = pair.x;
  }

  // An unattainable dual (the residual-only regime) diverges while the
  // primal point pins to the boundary, so the conjugate Hessian eventually
  // spans more orders of magnitude than one factorization can hold. That is
  // the precision floor, not a solver failure: return the last clean iterate
  // as "stalled" and let the caller judge the achieved residual.
  Eigen::VectorXd stalled_x;
  Eigen::VectorXd stalled_y;
  double stalled_residual = std::numeric_limits<double>::quiet_NaN();
  double stalled_lambda = std::numeric_limits<double>::quiet_NaN();
  double stalled_value = std::numeric_limits<double>::quiet_NaN();
  auto finish_stalled = [&]() {
    result.x = std::move(stalled_x);
    result.y = stalled_y;
    result.residual = stalled_residual;
    result.dual_lambda = stalled_lambda;
    result.dual_value = stalled_value;
    result.trace.status = "stalled";
    return result;
  };

  // Newton phase: damped while the decrement is large, pure afterwards.
  // Near an almost-touching manifold the decrement scales like
  // residual/depth, so the gradient tolerance can sit below the double
  // precision floor while the residual criterion is already met. The
  // progress guard detects that floor instead of spinning to the cap.
  double best_value = std::numeric_limits<double>::infinity();
  int floored_steps = 0;
  for (; iterations_used <= config.max_iterations; ++iterations_used) {
    ScOracle::Eval eval;
    std::optional<LocalGeometry> geom;
    Eigen::VectorXd x;
    try {
      eval = dual.phi_tilde->eval(y);
      geom.emplace(eval.hess);
      x = dual.phi->primal_point(y);
    } catch (const SingularHessianError&) {
      if (!config.residual_only || stalled_x.size() == 0) throw;
      return finish_stalled();
    }
    double lambda = geom->dual_norm(eval.grad);
    double residual = (inst.a * x - inst.b).norm();
    record(lambda > 0.5 ? "damped" : "newton", eval.value, lambda, residual,
           std::numeric_limits<double>::quiet_NaN(), 0.0);
    if (stop_met(residual, lambda)) {
      return finish(std::move(x), residual, lambda, eval.value);
    }
    stalled_x = std::move(x);
    stalled_y = y;
    stalled_residual = residual;
    stalled_lambda = lambda;
    stalled_value = eval.value;
    const double floor_tol =
        64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(eval.value));
    if (eval.value < best_value - floor_tol) {
      best_value = eval.value;
      floored_steps = 0;
    } else if (++floored_steps >= 8) {
      if (residual <= config.residual_tol) return finish_stalled();
      throw IterationLimitError(
          "dual progress hit the precision floor before the stopping rule; "
          "the requested tolerances are finer than double precision allows "
          "on this instance");
    }
    Eigen::VectorXd direction = geom->solve(eval.grad);
    Eigen::VectorXd next = y - direction;
    if (lambda > 0.5 || !dual.phi_tilde->in_domain(next)) {
      // The damped step stays interior in exact arithmetic; halvings only
      // engage when rounding in a degenerate geometry spoils the direction.
      double damp = 1.0 / (1.0 + lambda);
      next = y - damp * direction;
      int halvings = 0;
      while (!dual.phi_tilde->in_domain(next) && halvings < 60) {
        damp *= 0.5;
        next = y - damp * direction;
        ++halvings;
      }
      if (halvings == 60) {
        if (config.residual_only) return finish_stalled();
        throw DomainError("damped dual step left the conjugate domain");
      }
    }
    result.trace.rows.back().step_norm = geom->primal_norm(next - y);
    y = std::move(next);
  }
  throw IterationLimitError(
      "feasibility stopping rule not met within the cap; the instance may "
      "be infeasible beyond its depth");
}

DualExactResult dual_pathfollow_exact(const FeasibilityInstance& inst,
                                      double gamma,
                                      const DualExactConfig& config) {
  if (!(gamma > 0.0)) throw InvalidProblemError("gamma must be positive");
  DualObjective dual = make_dual_objective(inst);
  auto clock_start = std::chrono::steady_clock::now();

  DualExactResult result;
  result.trace.method = "dual-exact";
  const Eigen::VectorXd& b = inst.b;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(inst.a.rows());
  double sigma = 0.0;

  if (b.norm() == 0.0) {
    result.y = y;
    result.x = dual.phi->primal_point(y);
    result.residual = (inst.a * result.x).norm();
    result.sigma_sequence.push_back(0.0);
    result.multiplier_sequence.push_back(0.0);
    result.trace.status = "optimal";
    TraceRow row;
    row.phase = "done";
    result.trace.rows.push_back(std::move(row));
    return result;
  }

  for (int k = 0; k <= config.max_outer; ++k) {
    ScOracle::Eval eval = dual.phi->eval(y);
    LocalGeometry geom{eval.hess};
    double multiplier = least_squares_multiplier(geom, eval.grad, b);
    double lambda_c = geom.dual_norm(eval.grad - multiplier * b);
    Eigen::VectorXd x = dual.phi->primal_point(y);
    double residual = (inst.a * x - b).norm();

    result.sigma_sequence.push_back(sigma);
    result.multiplier_sequence.push_back(multiplier);
    TraceRow row;
    row.iter = k;
    row.phase = "path";
    row.f = multiplier;
    row.lambda = lambda_c;
    row.residual = residual;
    row.t = sigma;
    row.wall_s = seconds_since(clock_start);
    result.trace.rows.push_back(std::move(row));

    if (multiplier >= 1.0 - config.multiplier_tol) {
      result.y = std::move(y);
      result.x = std::move(x);
      result.sigma = sigma;
      result.multiplier = multiplier;
      result.residual = residual;
      result.trace.status = "optimal";
      result.trace.rows.back().phase = "done";
      return result;
    }
    if (k == config.max_outer) break;

    double b_norm = geom.dual_norm(b);
    double sigma_next = sigma + gamma * b_norm;
    Eigen::VectorXd z = y + (gamma / b_norm) * geom.solve(b);
    if (!dual.phi->in_domain(z)) {
      throw DomainError("exact path predictor left the conjugate domain");
    }

    // Inner equality-constrained centering on {<b,z> = sigma_next}; the
    // corrector direction is b-orthogonal, so the constraint is preserved
    // exactly.
    int inner = 0;
    for (; inner < config.max_inner; ++inner) {
      ScOracle::Eval ez = dual.phi->eval(z);
      LocalGeometry gz{ez.hess};
      double kappa = least_squares_multiplier(gz, ez.grad, b);
      Eigen::VectorXd residual_vec = ez.grad - kappa * b;
      double lam = gz.dual_norm(residual_vec);
      if (lam <= config.inner_tol) break;
      Eigen::VectorXd d = gz.solve(residual_vec);
      double damp = lam > 0.25 ? 1.0 / (1.0 + lam) : 1.0;
      Eigen::VectorXd z_next = z - damp * d;
      int halvings = 0;
      while (!dual.phi->in_domain(z_next) && halvings < 60) {
        damp *= 0.5;
        z_next = z - damp * d;
        ++halvings;
      }
      if (halvings == 60) {
        throw DomainError("inner centering could not stay in the domain");
      }
      z = std::move(z_next);
    }
    if (inner == config.max_inner) {
      throw IterationLimitError("inner centering did not converge");
    }
    y = std::move(z);
    sigma = sigma_next;
  }
  throw IterationLimitError(
      "multiplier did not stabilize within the outer cap");
}

SelfDualEmbedding lp_to_feasibility(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& c) {
  int m = static_cast<int>(a.rows());
  int n = static_cast<int>(a.cols());
  if (m < 1 || n < 1) throw InvalidProblemError("empty program");
  if (b.size() != m) throw DimensionError("b has wrong dimension");
  if (c.size() != n) throw DimensionError("c has wrong dimension");
  if (m > n) throw InvalidProblemError("more equality rows than variables");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> row_qr(a.transpose());
  if (row_qr.rank() < m) {
    // The pivoted columns of a' name an independent row set; the rest are
    // dependent.
    Eigen::VectorXi picked = row_qr.colsPermutation().indices();
    std::ostringstream msg;
    msg << "constraint matrix is row-rank deficient; dependent rows:";
    for (int i = row_qr.rank(); i < m; ++i) msg << ' ' << picked(i);
    throw InvalidProblemError(msg.str());
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> col_qr(a);
  Eigen::VectorXi perm = col_qr.colsPermutation().indices();
  Eigen::MatrixXd a_perm(m, n);
  Eigen::VectorXd c_perm(n);
  for (int j = 0; j < n; ++j) {
    a_perm.col(j) = a.col(perm(j));
    c_perm(j) = c(perm(j));
  }

  Eigen::FullPivLU<Eigen::MatrixXd> basis_lu(a_perm.leftCols(m));
  if (!basis_lu.isInvertible()) {
    throw InvalidProblemError("pivoted basis block is singular");
  }
  Eigen::MatrixXd row_transform =
      basis_lu.solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::MatrixXd a_tilde = row_transform * a_perm;  // (I_m, B)
  Eigen::MatrixXd bb = a_tilde.rightCols(n - m);
  Eigen::VectorXd b_t = row_transform * b;
  Eigen::VectorXd c1 = c_perm.head(m);
  Eigen::VectorXd c2 = c_perm.tail(n - m);

  SelfDualEmbedding emb;
  emb.n = n;
  emb.m = m;
  emb.row_transform = std::move(row_transform);
  emb.col_permutation = perm;
  emb.c_permuted = c_perm;
  emb.b_transformed = b_t;
  emb.a = a;
  emb.b = b;
  emb.c = c;

  int q = 2 * n + 1;
  Eigen::MatrixXd qm = Eigen::MatrixXd::Zero(n + 1, q);
  qm.block(0, 0, 1, n) = c_perm.transpose();
  qm.block(0, n, 1, m) = b_t.transpose();
  qm(0, q - 1) = -b_t.dot(c1);
  qm.block(1, 0, m, n) = a_tilde;
  qm.block(1, q - 1, m, 1) = -b_t;
  if (n > m) {
    qm.block(1 + m, n, n - m, m) = -bb.transpose();
    qm.block(1 + m, n + m, n - m, n - m) =
        Eigen::MatrixXd::Identity(n - m, n - m);
    qm.block(1 + m, q - 1, n - m, 1) = -(c2 - bb.transpose() * c1);
  }
  emb.q_matrix = qm;
  Eigen::VectorXd last = qm.col(q - 1);
  emb.reduced_a =
      qm.leftCols(q - 1) - last * Eigen::RowVectorXd::Ones(q - 1);
  emb.reduced_b = -last;
  return emb;
}

FeasibilityInstance embedding_instance(const SelfDualEmbedding& emb) {
  int d = 2 * emb.n;
  Eigen::VectorXd center = Eigen::VectorXd::Constant(d, 1.0 / (d + 1));
  FeasibilityInstance inst;
  inst.barrier = recentered_barrier(make_simplex_barrier(d), center);
  inst.a = emb.reduced_a;
  inst.b = emb.reduced_b - emb.reduced_a * center;
  return inst;
}

namespace {

// An interior-point iterate blurs the solution by the attained residual,
// while the sign pattern of (x, s) is exact well before that. Refit both
// sides on the detected support and accept only a verified improvement.
bool crossover_refit(const SelfDualEmbedding& emb, LpRecovery& rec) {
  const int n = emb.n;
  const int m = emb.m;
  if (emb.a.rows() != m || emb.a.cols() != n) return false;
  const double sx = std::max(1.0, rec.x.maxCoeff());
  const double ss = std::max(1.0, rec.s.maxCoeff());
  std::vector<int> support;
  for (int j = 0; j < n; ++j) {
    if (rec.x(j) / sx > rec.s(j) / ss) support.push_back(j);
  }
  if (support.empty()) return false;
  const int k = static_cast<int>(support.size());
  Eigen::MatrixXd a_s(m, k);
  Eigen::VectorXd c_s(k);
  for (int idx = 0; idx < k; ++idx) {
    a_s.col(idx) = emb.a.col(support[idx]);
    c_s(idx) = emb.c(support[idx]);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> primal_fit(a_s);
  Eigen::VectorXd x_s = primal_fit.solve(emb.b);
  if (x_s.minCoeff() < -1e-9 * sx) return false;
  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(n);
  for (int idx = 0; idx < k; ++idx) {
    x_hat(support[idx]) = std::max(0.0, x_s(idx));
  }
  const double feas_tol = 1e-9 * std::max(1.0, emb.b.cwiseAbs().maxCoeff());
  if ((emb.a * x_hat - emb.b).cwiseAbs().maxCoeff() > feas_tol) return false;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> dual_fit(
      a_s.transpose().eval());
  Eigen::VectorXd y_hat = dual_fit.solve(c_s);
  Eigen::VectorXd s_hat = emb.c - emb.a.transpose() * y_hat;
  const double dual_tol = 1e-8 * std::max(1.0, emb.c.cwiseAbs().maxCoeff());
  if (s_hat.minCoeff() < -dual_tol) return false;
  const double gap_hat = emb.c.dot(x_hat) - emb.b.dot(y_hat);
  if (std::abs(gap_hat) > std::max(std::abs(rec.gap), 1e-9)) return false;
  rec.x = std::move(x_hat);
  rec.y = std::move(y_hat);
  rec.s = std::move(s_hat);
  rec.gap = gap_hat;
  return true;
}

}  // namespace

LpRecovery recover_lp_solution(const SelfDualEmbedding& emb,
                               const Eigen::VectorXd& w) {
  int d = 2 * emb.n;
  if (w.size() != d) throw DimensionError("embedding point has wrong size");
  Eigen::VectorXd z =
      w + Eigen::VectorXd::Constant(d, 1.0 / (d + 1));
  double tau = 1.0 - z.sum();
  if (!(tau > 1e-9)) {
    throw InvalidProblemError(
        "homogenizing variable is zero; the program pair admits only a ray "
        "solution");
  }
  Eigen::VectorXd x_perm = z.head(emb.n) / tau;
  Eigen::VectorXd s_perm = z.segment(emb.n, emb.n) / tau;

  LpRecovery rec;
  rec.tau = tau;
  rec.x = Eigen::VectorXd::Zero(emb.n);
  rec.s = Eigen::VectorXd::Zero(emb.n);
  for (int j = 0; j < emb.n; ++j) {
    rec.x(emb.col_permutation(j)) = x_perm(j);
    rec.s(emb.col_permutation(j)) = s_perm(j);
  }
  Eigen::VectorXd y_t = emb.c_permuted.head(emb.m) - s_perm.head(emb.m);
  rec.y = emb.row_transform.transpose() * y_t;
  rec.gap = emb.c_permuted.dot(x_perm) - emb.b_transformed.dot(y_t);
  rec.polished = crossover_refit(emb, rec);
  return rec;
}

StrategyReport strategy_comparison(const FeasibilityInstance& inst,
                                   double dual_gamma,
                                   const FeasibilityConfig& config) {
  StrategyReport report;
  report.nu = inst.barrier->nu();
  report.eps = inst.eps_depth.value_or(
      std::numeric_limits<double>::quiet_NaN());
  double nu = report.nu;
  double eps = report.eps;
  bool known = inst.eps_depth.has_value();

  FeasibilityResult dnm = feasibility_via_dual(inst, FeasibilitySolver::Dnm,
                                               config);
  report.rows.push_back(
      {"dnm", dnm.trace.iterations(),
       known ? nu * std::log(1.0 / eps)
             : std::numeric_limits<double>::quiet_NaN(),
       dnm.residual});

  FeasibilityResult pfs = feasibility_via_dual(inst, FeasibilitySolver::Pfs,
                                               config);
  report.rows.push_back(
      {"pfs", pfs.trace.iterations(),
       known ? std::sqrt(nu * std::log(1.0 / eps))
             : std::numeric_limits<double>::quiet_NaN(),
       pfs.residual});

  DualExactResult exact = dual_pathfollow_exact(inst, dual_gamma);
  report.rows.push_back(
      {"dual-exact",
       static_cast<int>(exact.sigma_sequence.size()) - 1,
       known ? std::sqrt(nu) * std::log(nu / eps)
             : std::numeric_limits<double>::quiet_NaN(),
       exact.residual});
  return report;
}

double feasibility_depth(const FeasibilityInstance& inst, double tol) {
  require_instance_shapes(inst);
  require_anchored(*inst.barrier);
  if (!(tol > 0.0)) throw InvalidProblemError("tol must be positive");
  double nu = inst.barrier->nu();
  // A dual objective with no finite minimizer keeps its decrement >= 1, so
  // a dip below one certifies the shrunken set meets the manifold.  A
  // feasible trial dips within gap/omega(0.9) damped steps; the budget
  // covers relative depths down to about 1e-12.
  int budget = 200 + static_cast<int>(110.0 * nu);
  auto nonempty = [&](double delta) {
    auto barrier = scaled_domain_barrier(inst.barrier, 1.0 - delta);
    ConjugateAffineOracle phi(barrier, inst.a.transpose(),
                              Eigen::VectorXd::Zero(barrier->dim()),
                              Eigen::VectorXd::Zero(barrier->dim()));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(inst.a.rows());
    for (int k = 0; k < budget; ++k) {
      ScOracle::Eval eval = phi.eval(y);
      eval.grad -= inst.b;
      LocalGeometry geom{eval.hess};
      double lambda = geom.dual_norm(eval.grad);
      if (lambda < 0.9) return true;
      Eigen::VectorXd next = y - geom.solve(eval.grad) / (1.0 + lambda);
      if (!phi.in_domain(next)) return false;
      y = std::move(next);
    }
    return false;
  };

  if (!nonempty(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (nonempty(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace scopt
