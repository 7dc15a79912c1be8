#include "scopt/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scopt {

namespace {

// Alternating/monotone series around 0; the direct f(tau) - log1p form loses
// all relative precision once the result is O(tau^2).
constexpr double kSeriesCutoff = 1e-4;

double omega_series(double t) {
  // t^2/2 - t^3/3 + t^4/4 - t^5/5; truncation error < t^6/6.
  return t * t * (0.5 + t * (-1.0 / 3.0 + t * (0.25 - 0.2 * t)));
}

double omega_star_series(double t) {
  // t^2/2 + t^3/3 + t^4/4 + t^5/5; truncation error < t^6 / (6(1-t)).
  return t * t * (0.5 + t * (1.0 / 3.0 + t * (0.25 + 0.2 * t)));
}

}  // namespace

double omega(double tau) {
  if (!(tau >= 0.0)) throw DomainError("omega: tau must be >= 0");
  if (tau < kSeriesCutoff) return omega_series(tau);
  return tau - std::log1p(tau);
}

double omega_star(double tau) {
  if (!(tau >= 0.0) || tau >= 1.0)
    throw DomainError("omega_star: tau must lie in [0, 1)");
  if (tau < kSeriesCutoff) return omega_star_series(tau);
  return -tau - std::log1p(-tau);
}

double omega_prime(double tau) {
  if (!(tau >= 0.0)) throw DomainError("omega_prime: tau must be >= 0");
  return tau / (1.0 + tau);
}

double omega_star_prime(double tau) {
  if (!(tau >= 0.0) || tau >= 1.0)
    throw DomainError("omega_star_prime: tau must lie in [0, 1)");
  return tau / (1.0 - tau);
}

double omega_star_inverse(double v) {
  if (!(v >= 0.0)) throw DomainError("omega_star_inverse: v must be >= 0");
  if (v == 0.0) return 0.0;
  constexpr double kRight = 1.0 - 1e-15;
  const double v_max = -kRight - std::log1p(-kRight);
  if (v >= v_max) return kRight;

  // omega_star(t) >= t^2/2, so sqrt(2v) brackets the root from the right.
  double lo = 0.0;
  double hi = std::min(std::sqrt(2.0 * v), kRight);
  if (omega_star(hi) < v) hi = kRight;  // guard vs rounding near the cutoff
  double t = std::min(std::sqrt(2.0 * v) / (1.0 + std::sqrt(v / 2.0)), 0.5 * (lo + hi));

  for (int it = 0; it < 200; ++it) {
    const double r = omega_star(t) - v;
    if (std::abs(r) <= 1e-14 * std::max(1.0, v)) return t;
    if (r > 0.0)
      hi = t;
    else
      lo = t;
    // Newton step on omega_star(t) - v; derivative t/(1-t).
    double step = r * (1.0 - t) / std::max(t, 1e-300);
    double next = t - step;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-16) return 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

double PathConstants::kappa() const {
  const double g1 = 1.0 - gamma;
  return gamma / 2.0 - beta / (g1 * g1) - gamma * gamma / (g1 * g1 * g1);
}

namespace {

void push_condition(ConstantsReport& rep, const std::string& name, double slack) {
  rep.slacks.emplace_back(name, slack);
  if (!(slack >= 0.0)) {
    rep.ok = false;
    rep.violations.push_back(name);
  }
}

// Corrector-contraction condition shared by the predictor-corrector variants:
// one Newton step from the predictor point restores the centering level beta,
// which needs omega_star'(beta/(1-gamma) + (gamma/(1-gamma))^2) <= sqrt(beta).
double corrector_contraction_slack(double beta, double gamma) {
  if (gamma >= 1.0) return -1.0;
  const double q = gamma / (1.0 - gamma);
  const double arg = beta / (1.0 - gamma) + q * q;
  if (arg >= 1.0) return -1.0;
  return std::sqrt(beta) - omega_star_prime(arg);
}

}  // namespace

ConstantsReport validate_constants(const PathConstants& c) {
  ConstantsReport rep;
  rep.kappa = std::numeric_limits<double>::quiet_NaN();
  if (!std::isfinite(c.beta) || !std::isfinite(c.gamma))
    throw DomainError("validate_constants: fields must be finite");

  push_condition(rep, "beta-range", std::min(c.beta, 1.0 - c.beta));
  push_condition(rep, "gamma-positive", c.gamma);
  if (!rep.ok) return rep;

  const double sb = std::sqrt(c.beta);
  switch (c.variant) {
    case PathVariant::Pfs: {
      push_condition(rep, "step-admissibility", sb / (1.0 + sb) - c.beta - c.gamma);
      push_condition(rep, "decrease-margin", c.gamma - 2.0 * c.beta);
      double clamp_slack = -1.0;
      if (c.beta + c.gamma < 1.0)
        clamp_slack = c.gamma * (1.0 - 2.0 * c.beta) / 4.0 - omega_star(c.beta + c.gamma);
      push_condition(rep, "clamp-feasibility", clamp_slack);
      break;
    }
    case PathVariant::Pcpfs: {
      rep.kappa = c.kappa();
      push_condition(rep, "quadratic-decrease-margin", rep.kappa);
      push_condition(rep, "corrector-contraction",
                     corrector_contraction_slack(c.beta, c.gamma));
      break;
    }
    case PathVariant::BarrierPc: {
      // Only the corrector contraction matters here: the barrier schemes use
      // the parameter growth of t, not the kappa decrease margin (which is
      // negative for this pair).
      rep.kappa = c.kappa();
      push_condition(rep, "corrector-contraction",
                     corrector_contraction_slack(c.beta, c.gamma));
      break;
    }
  }
  return rep;
}

}  // namespace scopt
