#pragma once

#include <Eigen/Core>

#include "scopt/pathfollow.hpp"

namespace scopt {

// Decrement growth along a ray: moving from x to x + tau h with
// h = [hess f(x)]^{-1} c, r = ||c||*_x, the decrement of f_{t-tau} obeys
//   lambda_{f_{t-tau}}(x + tau h) <= lambda (1 + a/(1-a)) + (1/M)(a/(1-a))^2
// with a = |tau| M r < 1.
double predictor_bound(double lambda_before, double tau, double r, double m_f);

struct PcpfsStepInfo {
  double predictor_lambda = 0.0;  // lambda_{f_{t+}}(y), measured
  double predictor_cap = 0.0;     // predictor_bound value it must respect
  double c_norm = 0.0;            // ||c||*_x at the incoming point
};

// Predictor along -[hess f(x)]^{-1} grad f(x0), then a single corrector
// Newton step on f_{t+}; the output is centered at beta/M.
CenteredPair pcpfs_iterate(const ScOracle& f, const CenteredPair& pair,
                           const PathConstants& consts,
                           PcpfsStepInfo* info = nullptr);

PfsResult pcpfs_solve(const ScOracle& f, const Eigen::VectorXd& x0,
                      const PathConstants& consts = PathConstants::pcpfs(),
                      const PfsConfig& config = {});

// t_N <= exp(-kappa gamma N^2 / (M^2 gap)) for every N whose prefix stays
// outside the quadratic-convergence region.
PathRateReport pcpfs_rate_check(const PfsReport& report,
                                double f0_minus_fstar);

// Doubling trial with the predictor-corrector step; floor gamma = 0.158.
AdaptiveStep adaptive_pcpfs_iterate(const ScOracle& f,
                                    const CenteredPair& pair,
                                    double gamma_prev);

}  // namespace scopt
