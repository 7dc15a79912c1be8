#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "scopt/cubic.hpp"
#include "scopt/oracle.hpp"

namespace scopt {

struct ZooParams {
  int n = 2;
  int m = 6;
  double mu = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  double x0_scale = 1.0;
  // lse-valley controls: trajectory length in decades and the log weight.
  int decades = 4;
  double nu = 1.0;
  // Feasibility families: distance of the manifold from the domain wall.
  double depth = 0.5;
  bool with_reference = true;
};

// Standard-form LP: min <c,x> over A x = b, x >= 0, with the optimum
// certified by brute-force vertex enumeration.
struct LpData {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd interior;  // planted strictly positive feasible point
  double optimal_value = 0.0;
  Eigen::VectorXd optimal_vertex;
  Eigen::VectorXd optimal_dual;  // empty when no dual certificate was found
};

struct ProblemInstance {
  std::string name;
  std::shared_ptr<ScOracle> oracle;
  std::shared_ptr<BarrierOracle> barrier;
  std::shared_ptr<LipschitzStrongOracle> strong;
  Eigen::VectorXd x0;
  std::optional<double> f_star;
  std::optional<Eigen::VectorXd> x_star;
  std::optional<LpData> lp;
  // Optional equality constraints A x = b attached to the oracle's domain.
  std::optional<Eigen::MatrixXd> a_eq;
  std::optional<Eigen::VectorXd> b_eq;
};

// Known names: scalar-xlnx, box-barrier, simplex-entropy, lse, lse-valley,
// lp-random, logistic.
ProblemInstance zoo(const std::string& name, const ZooParams& params = {});

std::shared_ptr<ScOracle> make_scalar_xlnx();

// F(x) = -sum ln(1 - x_i^2) on (-1,1)^n; nu = 2n, center at the origin.
std::shared_ptr<BarrierOracle> make_box_barrier(int n);

// F(x) = -sum ln x_i - ln(1 - sum x_i) on the open simplex interior;
// nu = n + 1, center at x_i = 1/(n+1).
std::shared_ptr<BarrierOracle> make_simplex_barrier(int n);

// f(x) = mu * lse((A x + offsets)/mu) + (sigma/2)||x||^2 with declared
// sigma_f = sigma and H_f = 2 ||A||^3 / mu^2; offsets may be zero.
class LseOracle;
std::shared_ptr<LseOracle> make_lse_oracle(Eigen::MatrixXd a,
                                           Eigen::VectorXd offsets, double mu,
                                           double sigma);

// f(x) = sum ln(1+exp(-y_i <a_i,x>)) + (sigma/2)||x||^2 with declared
// sigma_f = sigma and H_f = sum ||a_i||^3 / (6 sqrt(3)).
std::shared_ptr<LipschitzStrongOracle> make_logistic_oracle(
    Eigen::MatrixXd a, Eigen::VectorXd labels, double sigma);

LpData make_random_lp(int n, int m, std::uint64_t seed);

// Enumerates all basic feasible points and fills the optimum fields.
void solve_lp_by_enumeration(LpData& lp);

// 1-D lse over tangent lines of -nu*ln(u) spanning `decades` decades, plus
// the ridge (nu/2)u^2 that places the minimizer near u = 1.  Damped Newton
// crosses the valley with M*lambda of order one, so its iteration count
// scales linearly with the gap.  Constants are measured by a dense scan and
// the domain is restricted to u above one decade below the start.
ProblemInstance make_lse_valley(int decades, double nu = 1.0);

class LseOracle final : public LipschitzStrongOracle {
 public:
  LseOracle(Eigen::MatrixXd a, Eigen::VectorXd offsets, double mu,
            double sigma);

  int dim() const override;
  double sc_constant() const override;
  bool in_domain(const Eigen::VectorXd& x) const override;
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override;
  Eval eval(const Eigen::VectorXd& x) const override;

  double sigma_strong() const override;
  double hess_lipschitz() const override;

  // Tighter measured constants (valid upper bounds on the declared domain).
  void declare_constants(double h_f, double m_f);
  // Restricts the domain to x > lower elementwise (open set).
  void restrict_domain_above(const Eigen::VectorXd& lower);

  const Eigen::MatrixXd& rows() const { return a_; }
  double mu() const { return mu_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd offsets_;
  double mu_;
  double sigma_;
  double h_declared_;
  double m_declared_;
  Eigen::VectorXd lower_;  // empty means all of R^n
};

}  // namespace scopt
