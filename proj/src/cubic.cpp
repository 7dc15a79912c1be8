#include "scopt/cubic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "scopt/errors.hpp"
#include "scopt/scalar.hpp"

namespace scopt {

double LipschitzStrongOracle::sc_constant() const {
  return sc_constant_from_lipschitz(sigma_strong(), hess_lipschitz());
}

double sc_constant_from_lipschitz(double sigma_f, double h_f) {
  if (!(sigma_f > 0.0)) {
    throw DomainError("strong convexity modulus must be positive");
  }
  if (h_f < 0.0) {
    throw DomainError("Hessian Lipschitz constant must be nonnegative");
  }
  return h_f / (2.0 * std::pow(sigma_f, 1.5));
}

double quadratic_region_threshold(double sigma_f, double h_f) {
  if (!(sigma_f > 0.0) || !(h_f > 0.0)) {
    throw DomainError("region threshold needs positive sigma_f and H_f");
  }
  return sigma_f * sigma_f * sigma_f / (2.0 * h_f * h_f);
}

namespace {

// B-norm of d, with B = identity when metric is null.
double metric_norm(const Eigen::VectorXd& d, const Eigen::MatrixXd* b) {
  if (b == nullptr) {
    return d.norm();
  }
  return std::sqrt(std::max(0.0, d.dot(*b * d)));
}

}  // namespace

CubicStepResult cubic_step_detailed(const ScOracle& f,
                                    const Eigen::VectorXd& x, double m_reg,
                                    const Eigen::MatrixXd* metric_b) {
  if (!(m_reg > 0.0)) {
    throw DomainError("cubic regularization constant must be positive");
  }
  const ScOracle::Eval e = f.eval(x);
  CubicStepResult result;
  result.point = x;
  if (e.grad.norm() == 0.0) {
    return result;
  }
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(x.size(), x.size());
  const Eigen::MatrixXd& b = metric_b ? *metric_b : identity;

  const auto step_at = [&](double r) -> Eigen::VectorXd {
    const Eigen::MatrixXd shifted = e.hess + (0.5 * m_reg * r) * b;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) {
      throw SingularHessianError("cubic model matrix is not positive definite");
    }
    return llt.solve(-e.grad);
  };

  // phi(r) = ||d(r)||_B - r is continuous and strictly decreasing; the model
  // minimizer is the unique root.  ||d(r)||_B <= 2 ||B^{-1} g||_B / (m r)
  // gives an upper bracket.
  Eigen::LLT<Eigen::MatrixXd> bllt(b);
  if (bllt.info() != Eigen::Success) {
    throw InvalidProblemError("cubic metric is not positive definite");
  }
  const double gs = metric_norm(bllt.solve(e.grad), &b);
  double lo = 0.0;
  double philo;
  try {
    philo = metric_norm(step_at(0.0), &b);
  } catch (const SingularHessianError&) {
    // Semi-definite Hessian: start the bracket just above zero.
    lo = 1e-300;
    philo = 1.0;
  }
  if (lo == 0.0 && philo == 0.0) {
    return result;  // Newton step is zero only when the gradient is
  }
  double hi = std::sqrt(2.0 * gs / m_reg) * (1.0 + 1e-8) + 1e-300;
  std::ostringstream history;
  history.setf(std::ios::scientific);
  int expand = 0;
  while (metric_norm(step_at(hi), &b) > hi) {
    hi *= 2.0;
    if (++expand > 200) {
      throw IterationLimitError("cubic secular bracket expansion failed");
    }
  }

  double r = hi;
  double dn = 0.0;
  bool converged = false;
  for (int it = 0; it < 240; ++it) {
    r = 0.5 * (lo + hi);
    if (!(r > lo) || !(r < hi)) {
      r = lo;
    }
    const Eigen::VectorXd d = step_at(r);
    dn = metric_norm(d, &b);
    result.secular_iterations = it + 1;
    if (std::abs(dn - r) <= 1e-10 * (1.0 + r)) {
      converged = true;
      break;
    }
    if (dn > r) {
      lo = r;
    } else {
      hi = r;
    }
    if (it < 12) {
      history << " [" << lo << "," << hi << "]";
    }
    if (hi - lo <= 1e-17 * (1.0 + hi)) {
      // Interval exhausted; accept the midpoint below if it meets tolerance.
      const Eigen::VectorXd dm = step_at(0.5 * (lo + hi));
      dn = metric_norm(dm, &b);
      r = 0.5 * (lo + hi);
      converged = std::abs(dn - r) <= 1e-8 * (1.0 + r);
      break;
    }
  }
  if (!converged) {
    throw IterationLimitError("cubic secular equation did not converge;" +
                              history.str());
  }
  const Eigen::VectorXd d = step_at(r);
  result.point = x + d;
  result.step_norm = metric_norm(d, &b);
  result.model_decrease =
      -(e.grad.dot(d) + 0.5 * d.dot(e.hess * d) +
        (m_reg / 6.0) * result.step_norm * result.step_norm *
            result.step_norm);
  return result;
}

Eigen::VectorXd cubic_step(const ScOracle& f, const Eigen::VectorXd& x,
                           double m_reg, const Eigen::MatrixXd* metric_b) {
  return cubic_step_detailed(f, x, m_reg, metric_b).point;
}

CrnmResult crnm_solve(const LipschitzStrongOracle& f,
                      const Eigen::VectorXd& x0, const CrnmConfig& config) {
  const double sigma = f.sigma_strong();
  const double h = f.hess_lipschitz();
  const double target = quadratic_region_threshold(sigma, h);
  const double m_sc = f.sc_constant();

  CrnmResult result;
  result.x = x0;
  result.trace.method = "crnm";
  result.trace.status = config.f_star ? "running" : "running-qf-surrogate";

  for (int it = 0; it <= config.max_iterations; ++it) {
    const double fx = f.value(result.x);
    const LocalGeometry geom = geometry_at(f, result.x);
    const double lambda = geom.dual_norm(f.gradient(result.x));
    TraceRow row;
    row.iter = it;
    row.phase = "cubic";
    row.f = fx;
    row.lambda = lambda;
    result.trace.rows.push_back(row);

    bool in_region;
    if (config.f_star) {
      in_region = fx - *config.f_star <= target;
    } else {
      // f - f* <= omega_*(M lambda)/M^2 <= 1/(8 M^2) = target when the
      // decrement satisfies omega_*(M lambda) <= 1/8.
      const double t = m_sc * lambda;
      in_region = t < 1.0 && omega_star(t) <= 0.125;
    }
    if (in_region) {
      result.trace.status =
          config.f_star ? "quadratic-region" : "quadratic-region-surrogate";
      return result;
    }
    if (it == config.max_iterations) {
      break;
    }
    const CubicStepResult step =
        cubic_step_detailed(f, result.x, h, f.metric());
    result.trace.rows.back().step_norm = step.step_norm;
    result.x = step.point;
  }
  throw IterationLimitError("crnm_solve exceeded its iteration cap");
}

int RestartPlan::stage_length(int stage) const {
  if (stage < 1) {
    throw DomainError("stage index is 1-based");
  }
  const double raw = k_p / std::pow(2.0, (stage - 1) / (2.0 * p));
  return std::max(1, static_cast<int>(std::ceil(raw - 1e-12)));
}

RestartPlan build_restart_plan(double p, double c, double m_f, double sigma_f,
                               double h_f, double gap0, int max_stages) {
  if (!(p > 0.0) || !(c > 0.0) || !(m_f >= 0.0) || !(gap0 >= 0.0)) {
    throw DomainError("restart plan needs positive p, c and nonnegative gap");
  }
  RestartPlan plan;
  plan.p = p;
  plan.c = c;
  plan.target = quadratic_region_threshold(sigma_f, h_f);
  plan.k_p = std::pow(std::pow(2.0, 3.5) * c * m_f * std::sqrt(gap0), 1.0 / p);
  if (!std::isfinite(plan.k_p)) {
    throw DomainError("restart plan stage length overflows");
  }
  plan.stage_lengths.reserve(max_stages);
  for (int k = 1; k <= max_stages; ++k) {
    plan.stage_lengths.push_back(plan.stage_length(k));
  }
  return plan;
}

StageMethod make_crnm_stage_method(double c) {
  StageMethod method;
  method.p = 2.0;
  method.c = c;
  method.run_stage = [](const LipschitzStrongOracle& f,
                        const Eigen::VectorXd& start, int iterations,
                        SolveTrace& trace) {
    Eigen::VectorXd x = start;
    const double h = f.hess_lipschitz();
    for (int i = 0; i < iterations; ++i) {
      const CubicStepResult step = cubic_step_detailed(f, x, h, f.metric());
      x = step.point;
      TraceRow row;
      row.iter = static_cast<int>(trace.rows.size());
      row.phase = "cubic";
      row.f = f.value(x);
      row.step_norm = step.step_norm;
      trace.rows.push_back(row);
    }
    return x;
  };
  return method;
}

MultistageResult multistage_solve(const StageMethod& method,
                                  const LipschitzStrongOracle& f,
                                  const Eigen::VectorXd& x0,
                                  const MultistageConfig& config) {
  const double f_lower =
      config.f_star ? *config.f_star : config.f_lower_bound;
  const double f0 = f.value(x0);
  if (f0 < f_lower) {
    throw InvalidProblemError("f(x0) is below the supplied lower bound");
  }
  MultistageResult result;
  result.plan = build_restart_plan(method.p, method.c, f.sc_constant(),
                                   f.sigma_strong(), f.hess_lipschitz(),
                                   f0 - f_lower, config.max_stages);
  result.x = x0;
  result.trace.method = "multistage";
  result.trace.status = "running";

  TraceRow start_row;
  start_row.iter = 0;
  start_row.phase = "start";
  start_row.f = f0;
  result.trace.rows.push_back(start_row);

  // With f* the region test is exact; otherwise the planned stage count from
  // the gap bound is executed in full.
  const double m_sq = f.sc_constant() * f.sc_constant();
  int planned_stages = config.max_stages;
  if (!config.f_star) {
    const double delta = std::max(2.0, m_sq * (f0 - f_lower));
    planned_stages = std::min<int>(
        config.max_stages,
        static_cast<int>(std::ceil(4.0 + std::log2(delta))));
    result.trace.status = "running-planned-stages";
  }

  for (int stage = 1; stage <= planned_stages; ++stage) {
    if (config.f_star &&
        f.value(result.x) - *config.f_star <= result.plan.target) {
      result.trace.status = "quadratic-region";
      return result;
    }
    const int len = result.plan.stage_length(stage);
    result.x = method.run_stage(f, result.x, len, result.trace);
    result.trace.stage_boundaries.push_back(
        static_cast<int>(result.trace.rows.size()) - 1);
    result.stages_run = stage;
  }
  if (config.f_star) {
    if (f.value(result.x) - *config.f_star <= result.plan.target) {
      result.trace.status = "quadratic-region";
      return result;
    }
    throw IterationLimitError("multistage_solve exceeded its stage cap");
  }
  result.trace.status = "planned-stages-done";
  return result;
}

double calibrate_rate_constant(const SolveTrace& trace, double f_star,
                               double h_f, double r0) {
  if (!(h_f > 0.0) || !(r0 > 0.0)) {
    throw DomainError("calibration needs positive H_f and start distance");
  }
  const double denom = h_f * r0 * r0 * r0;
  double c = 0.0;
  int k = 0;
  for (const TraceRow& row : trace.rows) {
    if (row.phase != "cubic") {
      continue;
    }
    ++k;
    const double gap = row.f - f_star;
    if (gap <= 0.0) {
      break;
    }
    c = std::max(c, gap * static_cast<double>(k) * k / denom);
  }
  if (!(c > 0.0)) {
    throw InvalidProblemError("trajectory has no usable envelope points");
  }
  return c;
}

}  // namespace scopt
