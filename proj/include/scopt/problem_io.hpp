#pragma once

#include <Eigen/Core>
#include <map>
#include <string>

#include "scopt/zoo.hpp"

namespace scopt {

// Structured text description of a problem: a zoo name plus named scalars,
// vectors, and matrices.  Doubles are serialized as hex floats, so a
// save/load round trip is bit-exact.
struct ProblemFile {
  std::string name;
  std::map<std::string, double> scalars;
  std::map<std::string, Eigen::VectorXd> vectors;
  std::map<std::string, Eigen::MatrixXd> matrices;
};

ProblemFile load_problem_file(const std::string& path);
void save_problem_file(const ProblemFile& file, const std::string& path);

// Builds the zoo instance named in the file; recognized scalars are n, m,
// mu, sigma, seed, x0_scale, decades, nu; vector "x0" overrides the start
// point; matrix "A_eq" and vector "b_eq" attach equality constraints.
ProblemInstance instance_from_file(const ProblemFile& file);
ProblemFile file_from_params(const std::string& name, const ZooParams& params);

// Dense standard-form LP text format: dimensions, c, b, then A row by row.
LpData load_lp(const std::string& path);
void save_lp(const LpData& lp, const std::string& path);

// Lossless double formatting/parsing used by the formats above.
std::string hex_double(double v);
double parse_double(const std::string& token);

}  // namespace scopt
