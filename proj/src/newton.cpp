#include "scopt/newton.hpp"

#include <cassert>
#include <cmath>

#include "scopt/errors.hpp"
#include "scopt/scalar.hpp"

namespace scopt {

namespace {

// omega and omega_star take dimensionless arguments; every call here passes
// the product of the sc constant with a decrement or a local norm.
double scaled_omega(double m_f, double lambda) {
  assert(m_f >= 0.0 && lambda >= 0.0);
  return omega(m_f * lambda);
}

}  // namespace

Eigen::VectorXd standard_newton_step(const ScOracle& f,
                                     const Eigen::VectorXd& x) {
  const LocalGeometry geom = geometry_at(f, x);
  const Eigen::VectorXd next = x - geom.solve(f.gradient(x));
  if (!f.in_domain(next)) {
    throw DomainError("standard Newton step left the domain");
  }
  return next;
}

Eigen::VectorXd damped_newton_step(const ScOracle& f,
                                   const Eigen::VectorXd& x) {
  const LocalGeometry geom = geometry_at(f, x);
  const Eigen::VectorXd g = f.gradient(x);
  const double lambda = geom.dual_norm(g);
  const Eigen::VectorXd direction = geom.solve(g);
  const Eigen::VectorXd next =
      x - direction / (1.0 + f.sc_constant() * lambda);
  if (!f.in_domain(next)) {
    throw DomainError("damped Newton step left the domain");
  }
  return next;
}

DnmResult dnm_solve(const ScOracle& f, const Eigen::VectorXd& x0,
                    const NewtonConfig& config) {
  const double m = f.sc_constant();
  const double target =
      config.target_lambda.value_or(m > 0.0 ? 0.5 / m : 1e-8);
  if (m * target > 0.5 + 1e-12) {
    throw DomainError("damped-phase target must satisfy M lambda <= 1/2");
  }
  const double finish =
      config.quad_finish_tol.value_or(m > 0.0 ? 1e-10 / m : 1e-10);

  DnmResult result;
  result.x = x0;
  result.trace.method = "dnm";
  result.trace.status = "running";
  if (!f.in_domain(result.x)) {
    throw DomainError("start point outside the domain");
  }

  bool damped_phase = true;
  for (int it = 0; it <= config.max_iterations; ++it) {
    const LocalGeometry geom = geometry_at(f, result.x);
    const Eigen::VectorXd g = f.gradient(result.x);
    const double lambda = geom.dual_norm(g);

    TraceRow row;
    row.iter = it;
    row.f = f.value(result.x);
    row.lambda = lambda;

    if (damped_phase && lambda <= target) {
      damped_phase = false;
      result.damped_iterations = it;
    }
    if (!damped_phase && lambda <= finish) {
      row.phase = "done";
      result.trace.rows.push_back(row);
      result.trace.status = "optimal";
      return result;
    }
    if (it == config.max_iterations) {
      row.phase = "cap";
      result.trace.rows.push_back(row);
      result.trace.status = "iteration-limit";
      return result;
    }

    const Eigen::VectorXd direction = geom.solve(g);
    if (damped_phase) {
      row.phase = "damped";
      const Eigen::VectorXd next =
          result.x - direction / (1.0 + m * lambda);
      if (!f.in_domain(next)) {
        throw DomainError("damped Newton step left the domain");
      }
      row.step_norm = geom.primal_norm(next - result.x);
      result.x = next;
    } else {
      Eigen::VectorXd next = result.x - direction;
      if (f.in_domain(next)) {
        row.phase = "newton";
      } else {
        // A correct sc constant forbids this; fall back to one damped step
        // and record the model error.
        row.phase = "newton-fallback";
        next = result.x - direction / (1.0 + m * lambda);
        if (!f.in_domain(next)) {
          throw DomainError("fallback damped step left the domain");
        }
      }
      row.step_norm = geom.primal_norm(next - result.x);
      result.x = next;
    }
    result.trace.rows.push_back(row);
  }
  result.trace.status = "iteration-limit";
  return result;
}

SuperlinearReport superlinear_bound_check(const SolveTrace& trace, double m_f,
                                          double f_star) {
  SuperlinearReport report;
  if (!(m_f > 0.0)) {
    throw DomainError("superlinear check needs a positive sc constant");
  }
  const double m_sq = m_f * m_f;
  for (std::size_t k = 0; k + 1 < trace.rows.size(); ++k) {
    const TraceRow& cur = trace.rows[k];
    const TraceRow& next = trace.rows[k + 1];
    if (!(m_f * cur.lambda <= 1.0)) {
      continue;
    }
    const double gap = m_sq * (cur.f - f_star);
    const double gap_next = m_sq * (next.f - f_star);
    if (!(gap > 0.0)) {
      continue;
    }
    const double predicted = gap - scaled_omega(1.0, omega_star_inverse(gap));
    ++report.checked;
    const double violation = gap_next - predicted;
    if (violation > report.max_violation) {
      report.max_violation = violation;
    }
    if (violation > 1e-9 * (1.0 + gap)) {
      report.ok = false;
    }
  }
  return report;
}

}  // namespace scopt
