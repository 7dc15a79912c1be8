#include "scopt/problem_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scopt/errors.hpp"

namespace scopt {

std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& token) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw InvalidProblemError("malformed number: " + token);
  }
  return v;
}

namespace {

std::string next_token(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) {
    throw InvalidProblemError(std::string("unexpected end of file, wanted ") +
                              what);
  }
  return token;
}

double next_double(std::istream& in, const char* what) {
  return parse_double(next_token(in, what));
}

long next_int(std::istream& in, const char* what) {
  const std::string token = next_token(in, what);
  try {
    std::size_t pos = 0;
    const long v = std::stol(token, &pos);
    if (pos != token.size()) {
      throw std::invalid_argument(token);
    }
    return v;
  } catch (const std::exception&) {
    throw InvalidProblemError("malformed integer: " + token);
  }
}

}  // namespace

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidProblemError("cannot open problem file: " + path);
  }
  std::string magic;
  long version = 0;
  in >> magic >> version;
  if (magic != "scopt-problem" || version != 1) {
    throw InvalidProblemError("not a scopt-problem v1 file: " + path);
  }
  ProblemFile file;
  std::string kind;
  while (in >> kind) {
    if (kind == "end") {
      return file;
    }
    if (kind == "name") {
      file.name = next_token(in, "name");
    } else if (kind == "scalar") {
      const std::string key = next_token(in, "scalar key");
      file.scalars[key] = next_double(in, "scalar value");
    } else if (kind == "vector") {
      const std::string key = next_token(in, "vector key");
      const long size = next_int(in, "vector size");
      if (size < 0 || size > (1L << 24)) {
        throw InvalidProblemError("vector size out of range");
      }
      Eigen::VectorXd v(size);
      for (long i = 0; i < size; ++i) {
        v[i] = next_double(in, "vector entry");
      }
      file.vectors[key] = std::move(v);
    } else if (kind == "matrix") {
      const std::string key = next_token(in, "matrix key");
      const long rows = next_int(in, "matrix rows");
      const long cols = next_int(in, "matrix cols");
      if (rows < 0 || cols < 0 || rows * cols > (1L << 26)) {
        throw InvalidProblemError("matrix size out of range");
      }
      Eigen::MatrixXd m(rows, cols);
      for (long i = 0; i < rows; ++i) {
        for (long j = 0; j < cols; ++j) {
          m(i, j) = next_double(in, "matrix entry");
        }
      }
      file.matrices[key] = std::move(m);
    } else {
      throw InvalidProblemError("unknown problem-file record: " + kind);
    }
  }
  throw InvalidProblemError("problem file missing end record: " + path);
}

void save_problem_file(const ProblemFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidProblemError("cannot write problem file: " + path);
  }
  out << "scopt-problem 1\n";
  if (!file.name.empty()) {
    out << "name " << file.name << "\n";
  }
  for (const auto& [key, value] : file.scalars) {
    out << "scalar " << key << " " << hex_double(value) << "\n";
  }
  for (const auto& [key, value] : file.vectors) {
    out << "vector " << key << " " << value.size();
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      out << " " << hex_double(value[i]);
    }
    out << "\n";
  }
  for (const auto& [key, value] : file.matrices) {
    out << "matrix " << key << " " << value.rows() << " " << value.cols()
        << "\n";
    for (Eigen::Index i = 0; i < value.rows(); ++i) {
      for (Eigen::Index j = 0; j < value.cols(); ++j) {
        out << (j ? " " : "") << hex_double(value(i, j));
      }
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) {
    throw InvalidProblemError("write failed: " + path);
  }
}

ProblemInstance instance_from_file(const ProblemFile& file) {
  if (file.name.empty()) {
    throw InvalidProblemError("problem file has no zoo name");
  }
  ZooParams params;
  const auto get = [&](const char* key, double fallback) {
    const auto it = file.scalars.find(key);
    return it == file.scalars.end() ? fallback : it->second;
  };
  params.n = static_cast<int>(get("n", params.n));
  params.m = static_cast<int>(get("m", params.m));
  params.mu = get("mu", params.mu);
  params.sigma = get("sigma", params.sigma);
  params.seed = static_cast<std::uint64_t>(get("seed", 1.0));
  params.x0_scale = get("x0_scale", params.x0_scale);
  params.decades = static_cast<int>(get("decades", params.decades));
  params.nu = get("nu", params.nu);
  ProblemInstance instance = zoo(file.name, params);
  const auto x0 = file.vectors.find("x0");
  if (x0 != file.vectors.end()) {
    if (x0->second.size() != instance.x0.size()) {
      throw DimensionError("x0 override has wrong dimension");
    }
    instance.x0 = x0->second;
  }
  const auto a_eq = file.matrices.find("A_eq");
  const auto b_eq = file.vectors.find("b_eq");
  if ((a_eq != file.matrices.end()) != (b_eq != file.vectors.end())) {
    throw InvalidProblemError("A_eq and b_eq must be given together");
  }
  if (a_eq != file.matrices.end()) {
    if (a_eq->second.rows() != b_eq->second.size()) {
      throw DimensionError("equality constraint shapes disagree");
    }
    instance.a_eq = a_eq->second;
    instance.b_eq = b_eq->second;
  }
  return instance;
}

ProblemFile file_from_params(const std::string& name,
                             const ZooParams& params) {
  ProblemFile file;
  file.name = name;
  file.scalars["n"] = params.n;
  file.scalars["m"] = params.m;
  file.scalars["mu"] = params.mu;
  file.scalars["sigma"] = params.sigma;
  file.scalars["seed"] = static_cast<double>(params.seed);
  file.scalars["x0_scale"] = params.x0_scale;
  file.scalars["decades"] = params.decades;
  file.scalars["nu"] = params.nu;
  return file;
}

LpData load_lp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidProblemError("cannot open LP file: " + path);
  }
  std::string magic;
  long version = 0;
  in >> magic >> version;
  if (magic != "scopt-lp" || version != 1) {
    throw InvalidProblemError("not a scopt-lp v1 file: " + path);
  }
  const auto expect = [&](const char* key) {
    const std::string token = next_token(in, key);
    if (token != key) {
      throw InvalidProblemError(std::string("expected record ") + key +
                                ", got " + token);
    }
  };
  expect("n");
  const long n = next_int(in, "n");
  expect("m");
  const long m = next_int(in, "m");
  if (n < 1 || m < 1 || n > (1L << 20) || m > (1L << 20)) {
    throw InvalidProblemError("LP dimensions out of range");
  }
  LpData lp;
  expect("c");
  lp.c.resize(n);
  for (long j = 0; j < n; ++j) {
    lp.c[j] = next_double(in, "objective entry");
  }
  expect("b");
  lp.b.resize(m);
  for (long i = 0; i < m; ++i) {
    lp.b[i] = next_double(in, "right-hand side entry");
  }
  expect("A");
  lp.a.resize(m, n);
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) {
      lp.a(i, j) = next_double(in, "matrix entry");
    }
  }
  std::string token;
  while (in >> token && token != "end") {
    if (token == "interior") {
      lp.interior.resize(n);
      for (long j = 0; j < n; ++j) {
        lp.interior[j] = next_double(in, "interior entry");
      }
    } else {
      throw InvalidProblemError("unknown LP record: " + token);
    }
  }
  if (token != "end") {
    throw InvalidProblemError("LP file missing end record: " + path);
  }
  return lp;
}

void save_lp(const LpData& lp, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidProblemError("cannot write LP file: " + path);
  }
  const Eigen::Index n = lp.c.size();
  const Eigen::Index m = lp.b.size();
  if (lp.a.rows() != m || lp.a.cols() != n) {
    throw DimensionError("LP shapes disagree");
  }
  out << "scopt-lp 1\n";
  out << "n " << n << "\nm " << m << "\nc";
  for (Eigen::Index j = 0; j < n; ++j) {
    out << " " << hex_double(lp.c[j]);
  }
  out << "\nb";
  for (Eigen::Index i = 0; i < m; ++i) {
    out << " " << hex_double(lp.b[i]);
  }
  out << "\nA\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out << (j ? " " : "") << hex_double(lp.a(i, j));
    }
    out << "\n";
  }
  if (lp.interior.size() == n) {
    out << "interior";
    for (Eigen::Index j = 0; j < n; ++j) {
      out << " " << hex_double(lp.interior[j]);
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) {
    throw InvalidProblemError("write failed: " + path);
  }
}

}  // namespace scopt
