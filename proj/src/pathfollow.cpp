#include "scopt/pathfollow.hpp"

#include <cmath>

#include "scopt/errors.hpp"

namespace scopt {

namespace {

constexpr double kAdaptiveGammaFloor = 0.1125;
constexpr double kCenteringSlack = 1e-9;  // relative, absorbs rounding

// Candidate iterate without the centering post-check.
CenteredPair pfs_step_raw(const ScOracle& f, const CenteredPair& pair,
                          double gamma) {
  const double m = f.sc_constant();
  if (!(m > 0.0)) {
    throw DomainError("path following needs a positive sc constant");
  }
  const LocalGeometry geom = geometry_at(f, pair.x);
  const double c_norm = geom.dual_norm(pair.c);
  if (!(c_norm > 0.0)) {
    // x0 was already optimal; the path is the single point x0.
    CenteredPair next = pair;
    next.t = 0.0;
    next.residual = 0.0;
    return next;
  }
  double t_next = pair.t - gamma / (m * c_norm);
  if (t_next < 1e-15) {
    t_next = 0.0;
  }
  // grad f_t(x) = grad f(x) + t c, since c = -grad f(x0).
  const Eigen::VectorXd shifted_grad = f.gradient(pair.x) + t_next * pair.c;
  CenteredPair next;
  next.t = t_next;
  next.c = pair.c;
  next.x = pair.x - geom.solve(shifted_grad);
  if (!f.in_domain(next.x)) {
    throw DomainError(
        "path-following step left the domain; declared sc constant is "
        "likely wrong");
  }
  next.residual = centering_residual(f, -pair.c, t_next, next.x);
  return next;
}

}  // namespace

double centering_residual(const ScOracle& f, const Eigen::VectorXd& x0_grad,
                          double t, const Eigen::VectorXd& x) {
  const LocalGeometry geom = geometry_at(f, x);
  return geom.dual_norm(f.gradient(x) - t * x0_grad);
}

CenteredPair pfs_iterate(const ScOracle& f, const CenteredPair& pair,
                         const PathConstants& consts) {
  if (consts.variant != PathVariant::Pfs) {
    throw DomainError("pfs_iterate needs PFS constants");
  }
  const ConstantsReport report = validate_constants(consts);
  if (!report.ok) {
    throw DomainError("path constants are inadmissible: " +
                      report.violations.front());
  }
  const double m = f.sc_constant();
  if (!(pair.residual <= consts.beta / m * (1.0 + kCenteringSlack))) {
    throw CenteringError("input pair is not centered");
  }
  CenteredPair next = pfs_step_raw(f, pair, consts.gamma);
  if (!(next.residual <= consts.beta / m * (1.0 + kCenteringSlack))) {
    throw CenteringError(
        "centering lost after an admissible step; declared sc constant is "
        "likely wrong");
  }
  return next;
}

PfsResult pfs_solve(const ScOracle& f, const Eigen::VectorXd& x0,
                    const PathConstants& consts, const PfsConfig& config) {
  const double m = f.sc_constant();
  if (!f.in_domain(x0)) {
    throw DomainError("start point outside the domain");
  }
  PfsResult result;
  result.report.constants = consts;
  result.report.m_f = m;
  if (config.d_bound) {
    result.report.d_bound = *config.d_bound;
  }
  const double finish = config.quad_finish_tol.value_or(1e-10 / m);

  CenteredPair pair;
  pair.t = 1.0;
  pair.x = x0;
  pair.c = -f.gradient(x0);
  pair.residual = 0.0;

  SolveTrace& trace = result.report.trace;
  trace.method = "pfs";
  trace.status = "running";

  int it = 0;
  while (true) {
    const LocalGeometry geom = geometry_at(f, pair.x);
    const double lambda_f = geom.dual_norm(f.gradient(pair.x));
    const double c_norm = geom.dual_norm(pair.c);

    TraceRow row;
    row.iter = it;
    row.phase = "path";
    row.f = f.value(pair.x);
    row.lambda = lambda_f;
    row.residual = pair.residual;
    row.t = pair.t;

    result.report.t_sequence.push_back(pair.t);
    result.report.c_norm_sequence.push_back(c_norm);
    result.report.f_sequence.push_back(row.f);
    result.report.lambda_f_sequence.push_back(lambda_f);

    if (m * lambda_f <= 0.5 || pair.t == 0.0) {
      row.phase = "path-exit";
      trace.rows.push_back(row);
      break;
    }
    trace.rows.push_back(row);
    if (it >= config.max_iterations) {
      throw IterationLimitError("pfs_solve exceeded its iteration cap");
    }
    pair = pfs_iterate(f, pair, consts);
    ++it;
  }
  result.report.path_iterations = it;

  // Quadratic finishing: standard Newton on f itself.
  Eigen::VectorXd x = pair.x;
  while (true) {
    const LocalGeometry geom = geometry_at(f, x);
    const Eigen::VectorXd g = f.gradient(x);
    const double lambda_f = geom.dual_norm(g);
    if (lambda_f <= finish) {
      break;
    }
    if (it >= config.max_iterations) {
      throw IterationLimitError("pfs_solve exceeded its iteration cap");
    }
    const Eigen::VectorXd next = x - geom.solve(g);
    if (!f.in_domain(next)) {
      throw DomainError("finishing Newton step left the domain");
    }
    x = next;
    ++it;
    TraceRow row;
    row.iter = it;
    row.phase = "newton";
    row.f = f.value(x);
    row.lambda = geometry_at(f, x).dual_norm(f.gradient(x));
    row.t = pair.t;
    trace.rows.push_back(row);
  }
  trace.status = "optimal";
  result.x = x;
  return result;
}

PathRateReport pfs_rate_check(const PfsReport& report, double f0_minus_fstar) {
  PathRateReport out;
  if (!(f0_minus_fstar > 0.0)) {
    return out;  // started at the optimum; nothing to check
  }
  const double m = report.m_f;
  const double beta = report.constants.beta;
  const double gamma = report.constants.gamma;
  const double scale =
      gamma * (gamma - 2.0 * beta) / (2.0 * m * m * f0_minus_fstar);
  bool prefix_outside = true;
  for (std::size_t n = 0; n < report.t_sequence.size(); ++n) {
    if (n < report.lambda_f_sequence.size() &&
        m * report.lambda_f_sequence[n] < 0.5) {
      prefix_outside = false;
    }
    if (!prefix_outside) {
      break;
    }
    const double bound = std::exp(-scale * static_cast<double>(n) * n);
    ++out.checked;
    const double violation = report.t_sequence[n] - bound;
    out.max_violation = std::max(out.max_violation, violation);
    if (violation > 1e-12) {
      out.ok = false;
    }
  }
  return out;
}

PathRateReport pfs_superlinear_check(const PfsReport& report,
                                     double f0_minus_fstar) {
  PathRateReport out;
  if (!(f0_minus_fstar > 0.0)) {
    return out;
  }
  const double m = report.m_f;
  const double beta = report.constants.beta;
  const double gamma = report.constants.gamma;
  const double tau = gamma * (gamma - 2.0 * beta) / (2.0 * m * m);
  for (std::size_t n = 0; n + 1 < report.t_sequence.size(); ++n) {
    const double steps = static_cast<double>(n) + 1.0;
    if (!(steps < f0_minus_fstar / tau)) {
      break;
    }
    const double bound =
        std::pow(1.0 - tau * steps / f0_minus_fstar, steps);
    ++out.checked;
    const double violation = report.t_sequence[n + 1] - bound;
    out.max_violation = std::max(out.max_violation, violation);
    if (violation > 1e-12) {
      out.ok = false;
    }
  }
  return out;
}

AdaptiveStep adaptive_pfs_iterate(const ScOracle& f, const CenteredPair& pair,
                                  double gamma_prev) {
  if (!(gamma_prev >= kAdaptiveGammaFloor)) {
    throw DomainError("previous stepsize below the admissible floor");
  }
  const double m = f.sc_constant();
  const double beta = PathConstants::pfs().beta;
  AdaptiveStep result;
  for (int i = 0;; ++i) {
    double gamma = std::pow(2.0, 1 - i) * gamma_prev;
    const bool at_floor = gamma <= kAdaptiveGammaFloor;
    if (at_floor) {
      gamma = kAdaptiveGammaFloor;
    }
    ++result.tries;
    CenteredPair candidate;
    try {
      candidate = pfs_step_raw(f, pair, gamma);
    } catch (const DomainError&) {
      if (at_floor) {
        throw;
      }
      continue;
    }
    if (candidate.residual <= beta / m * (1.0 + kCenteringSlack)) {
      result.pair = candidate;
      result.gamma_used = gamma;
      return result;
    }
    if (at_floor) {
      throw CenteringError(
          "floor stepsize failed to center; declared sc constant is likely "
          "wrong");
    }
  }
}

}  // namespace scopt
