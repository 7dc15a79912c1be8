#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scopt/scalar.hpp"
#include "scopt/zoo.hpp"

namespace scopt {

// Least squares of ln y on ln x after sorting by x and discarding the
// smallest point (transient regime).  Needs at least six positive pairs.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // fit is ln y = slope ln x + intercept
  int points_used = 0;
  double max_residual = 0.0;  // worst |ln y - fit| over used points
};

SlopeFit fit_loglog_slope(std::vector<double> x, std::vector<double> y);

// Step-size admissibility map over a (beta, gamma) grid.  A node is feasible
// when the predictor advance fits inside the centering tube,
//   sqrt(beta)/(1 + sqrt(beta)) - beta - gamma >= 0,
// and the per-step potential decrease stays nonnegative,
//   gamma (1 - 2 beta)/4 - omega_star(beta + gamma) >= 0.
// The objective gamma (gamma - 2 beta) is what the path-following complexity
// constant sqrt(2/objective) minimizes over.
struct ParamSearchCell {
  double beta = 0.0;
  double gamma = 0.0;
  bool step_room_ok = false;
  bool decrease_ok = false;
  double objective = 0.0;
};

struct ParamSearchResult {
  std::vector<ParamSearchCell> cells;  // beta-major grid order
  bool has_feasible = false;
  double best_objective = 0.0;
  double best_beta = 0.0;
  double best_gamma = 0.0;
};

ParamSearchResult param_search(const std::vector<double>& beta_grid,
                               const std::vector<double>& gamma_grid);

std::vector<double> uniform_grid(double lo, double hi, int count);

// Plot-ready dump: beta,gamma,step_room_ok,decrease_ok,feasible,objective.
void write_param_search_csv(const ParamSearchResult& result, std::ostream& os);

// One benchmark experiment: a family of instances laddered by a sweep
// variable, solved by each listed method.
//   sweep "none":  one instance straight from params per sweep value.
//   sweep "delta": start-distance ladder; the value scales x0 (benign lse,
//                  logistic) or sets the decade count (lse-valley).
//   sweep "eps":   feasibility depth ladder on the box instance
//                  {x in (-1,1)^n : x_1 = 1 - eps}.
//   sweep "nu":    barrier-parameter ladder on the box instance
//                  {x in (-1,1)^n : sum x = n/2} with n = value.
// Methods: dnm, pfs, pcpfs, crnm, multistage, feas-dnm, feas-pfs,
// dual-exact.
struct ExperimentSpec {
  std::string name = "experiment";
  std::string instance;
  ZooParams params;
  std::vector<std::string> methods;
  std::string sweep = "none";
  std::vector<double> sweep_values;
  std::uint64_t seed = 1;
  double row_timeout_s = 60.0;
  std::optional<PathConstants> constants;  // override for path methods
};

ExperimentSpec experiment_from_json(const std::string& text);
std::string experiment_to_json(const ExperimentSpec& spec);

struct ExperimentRow {
  std::string instance;
  std::string method;
  double sweep_value = 0.0;
  double scale_x = 0.0;  // abscissa of the slope fit: Delta, ln(1/eps), nu
  int iterations_to_region = 0;
  int total_iterations = 0;
  double final_lambda = 0.0;
  double certificate = 0.0;  // f-gap bound omega_star(M lambda)/M^2, or the
                             // constraint residual for feasibility methods
  double f_gap = 0.0;        // realized f - f_star when known
  std::string status = "ok";
  double wall_s = 0.0;       // reported in the JSON summary only
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ExperimentRow> rows;
  std::map<std::string, SlopeFit> slopes;  // per method, rows with status ok

  // Byte-deterministic for a fixed spec: no wall times, locale-independent
  // formatting, schema version in the first column.
  std::string csv() const;
  // Slopes plus per-row wall times; not covered by the determinism contract.
  std::string json_summary() const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Writes <name>.csv and <name>.json under out_dir.
void write_experiment_files(const ExperimentResult& result,
                            const std::string& out_dir);

}  // namespace scopt
