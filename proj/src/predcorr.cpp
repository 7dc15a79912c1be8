#include "scopt/predcorr.hpp"

#include <cmath>

#include "scopt/errors.hpp"

namespace scopt {

namespace {

constexpr double kAdaptiveGammaFloor = 0.158;
constexpr double kCenteringSlack = 1e-9;

CenteredPair pcpfs_step_raw(const ScOracle& f, const CenteredPair& pair,
                            double gamma, PcpfsStepInfo* info) {
  const double m = f.sc_constant();
  if (!(m > 0.0)) {
    throw DomainError("path following needs a positive sc constant");
  }
  const LocalGeometry geom = geometry_at(f, pair.x);
  const double c_norm = geom.dual_norm(pair.c);
  if (!(c_norm > 0.0)) {
    CenteredPair next = pair;
    next.t = 0.0;
    next.residual = 0.0;
    return next;
  }
  const double tau = gamma / (m * c_norm);
  double t_next = pair.t - tau;
  if (t_next < 1e-15) {
    t_next = 0.0;
  }
  // Predictor: y = x + tau h with h = H^{-1} c (c = -grad f(x0)).
  const Eigen::VectorXd h = geom.solve(pair.c);
  const Eigen::VectorXd y = pair.x + tau * h;
  if (!f.in_domain(y)) {
    throw DomainError(
        "predictor left the domain; declared sc constant is likely wrong");
  }
  if (info != nullptr) {
    info->c_norm = c_norm;
    info->predictor_lambda =
        centering_residual(f, -pair.c, t_next, y);
    // The realized move is tau in t; the clamp only shortens it.
    const double tau_realized = pair.t - t_next;
    info->predictor_cap =
        predictor_bound(pair.residual, tau_realized, c_norm, m);
  }
  // Corrector: one standard Newton step on f_{t+} from y.
  const LocalGeometry geom_y = geometry_at(f, y);
  const Eigen::VectorXd shifted_grad = f.gradient(y) + t_next * pair.c;
  CenteredPair next;
  next.t = t_next;
  next.c = pair.c;
  next.x = y - geom_y.solve(shifted_grad);
  if (!f.in_domain(next.x)) {
    throw DomainError(
        "corrector left the domain; declared sc constant is likely wrong");
  }
  next.residual = centering_residual(f, -pair.c, t_next, next.x);
  return next;
}

}  // namespace

double predictor_bound(double lambda_before, double tau, double r,
                       double m_f) {
  if (!(m_f > 0.0) || !(lambda_before >= 0.0) || !(r >= 0.0)) {
    throw DomainError("predictor bound needs M > 0, lambda >= 0, r >= 0");
  }
  const double a = std::abs(tau) * m_f * r;
  if (!(a < 1.0)) {
    throw DomainError("predictor bound requires |tau| M r < 1");
  }
  const double q = a / (1.0 - a);
  return lambda_before * (1.0 + q) + q * q / m_f;
}

CenteredPair pcpfs_iterate(const ScOracle& f, const CenteredPair& pair,
                           const PathConstants& consts, PcpfsStepInfo* info) {
  if (consts.variant != PathVariant::Pcpfs) {
    throw DomainError("pcpfs_iterate needs PCPFS constants");
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
  CenteredPair next = pcpfs_step_raw(f, pair, consts.gamma, info);
  if (!(next.residual <= consts.beta / m * (1.0 + kCenteringSlack))) {
    throw CenteringError(
        "centering lost after an admissible predictor-corrector step; "
        "declared sc constant is likely wrong");
  }
  return next;
}

PfsResult pcpfs_solve(const ScOracle& f, const Eigen::VectorXd& x0,
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
  trace.method = "pcpfs";
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
      throw IterationLimitError("pcpfs_solve exceeded its iteration cap");
    }
    pair = pcpfs_iterate(f, pair, consts, nullptr);
    ++it;
  }
  result.report.path_iterations = it;

  Eigen::VectorXd x = pair.x;
  while (true) {
    const LocalGeometry geom = geometry_at(f, x);
    const Eigen::VectorXd g = f.gradient(x);
    const double lambda_f = geom.dual_norm(g);
    if (lambda_f <= finish) {
      break;
    }
    if (it >= config.max_iterations) {
      throw IterationLimitError("pcpfs_solve exceeded its iteration cap");
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

PathRateReport pcpfs_rate_check(const PfsReport& report,
                                double f0_minus_fstar) {
  PathRateReport out;
  if (!(f0_minus_fstar > 0.0)) {
    return out;
  }
  const double m = report.m_f;
  const double gamma = report.constants.gamma;
  const double kappa = report.constants.kappa();
  const double scale = kappa * gamma / (m * m * f0_minus_fstar);
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

AdaptiveStep adaptive_pcpfs_iterate(const ScOracle& f,
                                    const CenteredPair& pair,
                                    double gamma_prev) {
  if (!(gamma_prev >= kAdaptiveGammaFloor)) {
    throw DomainError("previous stepsize below the admissible floor");
  }
  const double m = f.sc_constant();
  const double beta = PathConstants::pcpfs().beta;
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
      candidate = pcpfs_step_raw(f, pair, gamma, nullptr);
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
