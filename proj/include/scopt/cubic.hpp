#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "scopt/oracle.hpp"
#include "scopt/trace.hpp"

namespace scopt {

// Oracle carrying a strong-convexity modulus sigma_f and a Hessian Lipschitz
// constant H_f, both in the metric ||x||^2 = <B x, x>:
//   f(y) >= f(x) + <grad f(x), y-x> + (sigma_f/2) ||y-x||^2
//   ||hess f(x) - hess f(y)||_op <= H_f ||x-y||
// Such f is self-concordant with M_f = H_f / (2 sigma_f^{3/2}); subclasses
// may declare a tighter sc_constant() when they know one.
class LipschitzStrongOracle : public ScOracle {
 public:
  virtual double sigma_strong() const = 0;
  virtual double hess_lipschitz() const = 0;
  // Identity metric when null.
  virtual const Eigen::MatrixXd* metric() const { return nullptr; }
  double sc_constant() const override;
};

double sc_constant_from_lipschitz(double sigma_f, double h_f);

// Threshold of the quadratic-convergence region of CRNM:
// f(x) - f* <= sigma_f^3 / (2 H_f^2), equivalently 1/(8 M_f^2).
double quadratic_region_threshold(double sigma_f, double h_f);

// Global minimizer of the cubic model
//   f(x) + <g, y-x> + 1/2 <H (y-x), y-x> + (m_reg/6) ||y-x||^3
// found by solving the secular equation ||d(r)|| = r with
// d(r) = -(H + (m_reg r / 2) B)^{-1} g.
struct CubicStepResult {
  Eigen::VectorXd point;
  double step_norm = 0.0;
  double model_decrease = 0.0;
  int secular_iterations = 0;
};

CubicStepResult cubic_step_detailed(const ScOracle& f,
                                    const Eigen::VectorXd& x, double m_reg,
                                    const Eigen::MatrixXd* metric_b = nullptr);

Eigen::VectorXd cubic_step(const ScOracle& f, const Eigen::VectorXd& x,
                           double m_reg,
                           const Eigen::MatrixXd* metric_b = nullptr);

struct CrnmConfig {
  int max_iterations = 50000;
  // Stop when f(x) - f_star <= quadratic_region_threshold; without f_star a
  // decrement surrogate is used and the trace status is flagged.
  std::optional<double> f_star;
};

struct CrnmResult {
  Eigen::VectorXd x;
  SolveTrace trace;
};

CrnmResult crnm_solve(const LipschitzStrongOracle& f, const Eigen::VectorXd& x0,
                      const CrnmConfig& config = {});

// Restart schedule for the multi-stage acceleration wrapper: stage k runs
// ceil(k_p / 2^{(k-1)/(2p)}) inner iterations of the base method.
struct RestartPlan {
  double p = 2.0;
  double c = 1.0;
  double k_p = 1.0;
  double target = 0.0;  // quadratic-region threshold
  std::vector<int> stage_lengths;

  int stage_length(int stage) const;  // 1-based
};

// k_p = (2^{7/2} c M_f (f0 - f_lower)^{1/2})^{1/p}.
RestartPlan build_restart_plan(double p, double c, double m_f,
                               double sigma_f, double h_f, double gap0,
                               int max_stages = 64);

// Base method run for a fixed number of iterations from a start point; rows
// for each inner iteration are appended to the trace.
struct StageMethod {
  double p = 2.0;
  double c = 1.0;
  std::function<Eigen::VectorXd(const LipschitzStrongOracle&,
                                const Eigen::VectorXd&, int, SolveTrace&)>
      run_stage;
};

StageMethod make_crnm_stage_method(double c);

struct MultistageConfig {
  int max_stages = 64;
  std::optional<double> f_star;   // enables the exact region test
  double f_lower_bound = 0.0;     // used for k_p when f_star is absent
};

struct MultistageResult {
  Eigen::VectorXd x;
  SolveTrace trace;  // stage_boundaries filled in
  RestartPlan plan;
  int stages_run = 0;
};

MultistageResult multistage_solve(const StageMethod& method,
                                  const LipschitzStrongOracle& f,
                                  const Eigen::VectorXd& x0,
                                  const MultistageConfig& config);

// Smallest c with f_k - f* <= c H_f R0^3 / k^2 along a recorded trajectory;
// callers inflate it before trusting it on other starts.
double calibrate_rate_constant(const SolveTrace& trace, double f_star,
                               double h_f, double r0);

}  // namespace scopt
