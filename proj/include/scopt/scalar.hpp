#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scopt/errors.hpp"

namespace scopt {

// omega(tau) = tau - ln(1 + tau), tau >= 0. Lower-model profile function.
double omega(double tau);

// omega_star(tau) = -tau - ln(1 - tau), 0 <= tau < 1. Upper-model profile.
double omega_star(double tau);

// omega'(tau) = tau / (1 + tau).
double omega_prime(double tau);

// omega_star'(tau) = tau / (1 - tau). Inverse map of omega_prime.
double omega_star_prime(double tau);

// Inverse of omega_star on [0, 1 - 1e-15): returns tau with
// omega_star(tau) = v to absolute tolerance 1e-12. Values of v beyond
// omega_star(1 - 1e-15) ~ 33.5 clamp to the right endpoint.
double omega_star_inverse(double v);

enum class PathVariant { Pfs, Pcpfs, BarrierPc };

// Step-size pair (beta, gamma) for a path-following scheme. beta bounds the
// admissible centering residual (scaled by M_f), gamma the per-iteration
// advance of the path parameter.
struct PathConstants {
  double beta;
  double gamma;
  PathVariant variant;

  static PathConstants pfs() { return {0.026, 0.1125, PathVariant::Pfs}; }
  static PathConstants pcpfs() { return {0.0015, 0.158, PathVariant::Pcpfs}; }
  static PathConstants barrier_pc() { return {0.06, 0.254, PathVariant::BarrierPc}; }

  // Quadratic decrease margin gamma/2 - beta/(1-gamma)^2 - gamma^2/(1-gamma)^3
  // of the predictor-corrector rate. Positive only for admissible
  // predictor-corrector pairs aimed at value decrease.
  double kappa() const;
};

struct ConstantsReport {
  bool ok = true;
  // Each checked condition with its numeric slack (>= 0 means satisfied).
  std::vector<std::pair<std::string, double>> slacks;
  std::vector<std::string> violations;
  double kappa;  // NaN for the plain path-following variant
};

// Checks the admissibility conditions of (beta, gamma) for the given variant.
ConstantsReport validate_constants(const PathConstants& c);

}  // namespace scopt
