#include "scopt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "scopt/cubic.hpp"
#include "scopt/errors.hpp"
#include "scopt/feasibility.hpp"
#include "scopt/newton.hpp"
#include "scopt/pathfollow.hpp"
#include "scopt/predcorr.hpp"
#include "scopt/trace.hpp"

namespace scopt {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

SlopeFit fit_loglog_slope(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) throw DimensionError("slope fit needs pairs");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw InvalidProblemError("slope fit needs positive data");
    }
    pts.emplace_back(x[i], y[i]);
  }
  if (pts.size() < 6) {
    throw InvalidProblemError("slope fit needs at least six ladder points");
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(pts.begin());  // transient regime

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (auto& [px, py] : pts) {
    double lx = std::log(px);
    double ly = std::log(py);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = static_cast<double>(pts.size());
  double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) {
    throw InvalidProblemError("slope fit abscissas are degenerate");
  }
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.points_used = static_cast<int>(pts.size());
  for (auto& [px, py] : pts) {
    double r = std::abs(std::log(py) -
                        (fit.slope * std::log(px) + fit.intercept));
    fit.max_residual = std::max(fit.max_residual, r);
  }
  return fit;
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw InvalidProblemError("bad grid range");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return g;
}

ParamSearchResult param_search(const std::vector<double>& beta_grid,
                               const std::vector<double>& gamma_grid) {
  ParamSearchResult result;
  result.best_objective = -std::numeric_limits<double>::infinity();
  result.cells.reserve(beta_grid.size() * gamma_grid.size());
  for (double b : beta_grid) {
    for (double g : gamma_grid) {
      if (!(b >= 0.0) || b >= 1.0 || !(g >= 0.0) || g >= 1.0) {
        throw InvalidProblemError("grids must lie in [0, 1)");
      }
      ParamSearchCell cell;
      cell.beta = b;
      cell.gamma = g;
      cell.objective = g * (g - 2.0 * b);
      double sq = std::sqrt(b);
      cell.step_room_ok = sq / (1.0 + sq) - b - g >= 0.0;
      cell.decrease_ok =
          b + g < 1.0 && g * (1.0 - 2.0 * b) / 4.0 - omega_star(b + g) >= 0.0;
      if (cell.step_room_ok && cell.decrease_ok &&
          cell.objective > result.best_objective) {
        result.has_feasible = true;
        result.best_objective = cell.objective;
        result.best_beta = b;
        result.best_gamma = g;
      }
      result.cells.push_back(cell);
    }
  }
  if (!result.has_feasible) result.best_objective = kNan;
  return result;
}

void write_param_search_csv(const ParamSearchResult& result,
                            std::ostream& os) {
  os << "beta,gamma,step_room_ok,decrease_ok,feasible,objective\n";
  for (const auto& c : result.cells) {
    os << format_double(c.beta) << ',' << format_double(c.gamma) << ','
       << (c.step_room_ok ? 1 : 0) << ',' << (c.decrease_ok ? 1 : 0) << ','
       << (c.step_room_ok && c.decrease_ok ? 1 : 0) << ','
       << format_double(c.objective) << '\n';
  }
}

namespace {

PathVariant variant_from_string(const std::string& s) {
  if (s == "pfs") return PathVariant::Pfs;
  if (s == "pcpfs") return PathVariant::Pcpfs;
  if (s == "barrier-pc") return PathVariant::BarrierPc;
  throw InvalidProblemError("unknown constants variant: " + s);
}

std::string variant_to_string(PathVariant v) {
  switch (v) {
    case PathVariant::Pfs:
      return "pfs";
    case PathVariant::Pcpfs:
      return "pcpfs";
    default:
      return "barrier-pc";
  }
}

PathConstants defaults_for(PathVariant v) {
  switch (v) {
    case PathVariant::Pfs:
      return PathConstants::pfs();
    case PathVariant::Pcpfs:
      return PathConstants::pcpfs();
    default:
      return PathConstants::barrier_pc();
  }
}

}  // namespace

ExperimentSpec experiment_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentSpec spec;
  spec.name = j.value("name", spec.name);
  spec.instance = j.at("instance").get<std::string>();
  spec.methods = j.at("methods").get<std::vector<std::string>>();
  spec.sweep = j.value("sweep", spec.sweep);
  if (j.contains("sweep_values")) {
    spec.sweep_values = j["sweep_values"].get<std::vector<double>>();
  }
  spec.seed = j.value("seed", spec.seed);
  spec.row_timeout_s = j.value("row_timeout_s", spec.row_timeout_s);
  if (j.contains("params")) {
    const auto& p = j["params"];
    spec.params.n = p.value("n", spec.params.n);
    spec.params.m = p.value("m", spec.params.m);
    spec.params.mu = p.value("mu", spec.params.mu);
    spec.params.sigma = p.value("sigma", spec.params.sigma);
    spec.params.x0_scale = p.value("x0_scale", spec.params.x0_scale);
    spec.params.decades = p.value("decades", spec.params.decades);
    spec.params.nu = p.value("nu", spec.params.nu);
    spec.params.depth = p.value("depth", spec.params.depth);
  }
  if (j.contains("constants")) {
    const auto& c = j["constants"];
    PathConstants pc =
        defaults_for(variant_from_string(c.at("variant").get<std::string>()));
    pc.beta = c.value("beta", pc.beta);
    pc.gamma = c.value("gamma", pc.gamma);
    spec.constants = pc;
  }
  return spec;
}

std::string experiment_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["instance"] = spec.instance;
  j["methods"] = spec.methods;
  j["sweep"] = spec.sweep;
  j["sweep_values"] = spec.sweep_values;
  j["seed"] = spec.seed;
  j["row_timeout_s"] = spec.row_timeout_s;
  j["params"] = {{"n", spec.params.n},         {"m", spec.params.m},
                 {"mu", spec.params.mu},       {"sigma", spec.params.sigma},
                 {"x0_scale", spec.params.x0_scale},
                 {"decades", spec.params.decades},
                 {"nu", spec.params.nu},       {"depth", spec.params.depth}};
  if (spec.constants) {
    j["constants"] = {{"variant", variant_to_string(spec.constants->variant)},
                      {"beta", spec.constants->beta},
                      {"gamma", spec.constants->gamma}};
  }
  return j.dump(2);
}

namespace {

struct BuiltInstance {
  ProblemInstance zoo_inst;
  std::optional<FeasibilityInstance> feas;
  double scale_x = 0.0;
};

FeasibilityInstance box_feasibility(int n, const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b, double depth) {
  FeasibilityInstance inst;
  inst.barrier = make_box_barrier(n);
  inst.a = a;
  inst.b = b;
  inst.eps_depth = depth;
  return inst;
}

BuiltInstance build_instance(const ExperimentSpec& spec, double value) {
  BuiltInstance bi;
  if (spec.sweep == "eps") {
    if (spec.instance != "box-feasibility") {
      throw InvalidProblemError("eps sweep needs the box-feasibility family");
    }
    if (!(value > 0.0) || value >= 1.0) {
      throw InvalidProblemError("eps sweep values must lie in (0, 1)");
    }
    int n = spec.params.n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, n);
    a(0, 0) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Constant(1, 1.0 - value);
    bi.feas = box_feasibility(n, a, b, value);
    bi.scale_x = std::log(1.0 / value);
    return bi;
  }
  if (spec.sweep == "nu") {
    if (spec.instance != "box-feasibility") {
      throw InvalidProblemError("nu sweep needs the box-feasibility family");
    }
    int n = static_cast<int>(std::lround(value));
    if (n < 1) throw InvalidProblemError("nu sweep values must be dimensions");
    const double depth = spec.params.depth;
    if (!(depth > 0.0) || depth >= 1.0) {
      throw InvalidProblemError("feasibility depth must lie in (0, 1)");
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, n);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(1, (1.0 - depth) * n);
    bi.feas = box_feasibility(n, a, b, depth);
    bi.scale_x = bi.feas->barrier->nu();
    return bi;
  }

  ZooParams params = spec.params;
  params.seed = spec.seed;
  if (spec.sweep == "delta") {
    if (spec.instance == "lse-valley") {
      params.decades = static_cast<int>(std::lround(value));
    } else {
      params.x0_scale = value;
    }
  } else if (spec.sweep != "none") {
    throw InvalidProblemError("unknown sweep kind: " + spec.sweep);
  }
  bi.zoo_inst = zoo(spec.instance, params);
  if (spec.sweep == "delta") {
    if (!bi.zoo_inst.oracle || !bi.zoo_inst.f_star) {
      throw InvalidProblemError(
          "delta sweep needs an oracle instance with a known optimum");
    }
    double m = bi.zoo_inst.oracle->sc_constant();
    double gap = bi.zoo_inst.oracle->value(bi.zoo_inst.x0) -
                 *bi.zoo_inst.f_star;
    bi.scale_x = m > 0.0 ? m * m * gap : gap;
  } else {
    bi.scale_x = value;
  }
  return bi;
}

// f-gap certificate omega_star(M lambda)/M^2, finite only inside the
// quadratic region; lambda itself when M = 0 (quadratic objective).
double gap_certificate(double m, double lambda) {
  if (m == 0.0) return lambda;
  double t = m * lambda;
  if (!(t < 1.0)) return kNan;
  return omega_star(t) / (m * m);
}

struct MethodOutcome {
  int iterations_to_region = 0;
  int total_iterations = 0;
  double final_lambda = kNan;
  double certificate = kNan;
  double f_gap = kNan;
  // Non-empty when the solve ended at the precision floor rather than the
  // stopping rule; such rows are excluded from slope fits.
  std::string solve_status;
};

int count_phase(const SolveTrace& trace, const std::string& phase) {
  int n = 0;
  for (const auto& row : trace.rows) {
    if (row.phase == phase) ++n;
  }
  return n;
}

MethodOutcome run_oracle_method(const std::string& method,
                                const BuiltInstance& bi,
                                const std::optional<PathConstants>& consts,
                                double calibrated_c) {
  const ProblemInstance& inst = bi.zoo_inst;
  MethodOutcome out;

  auto finish_smooth = [&](const ScOracle& f, const Eigen::VectorXd& x,
                           const SolveTrace& trace) {
    out.total_iterations = trace.iterations();
    out.final_lambda = newton_decrement(f, x);
    out.certificate = gap_certificate(f.sc_constant(), out.final_lambda);
    if (inst.f_star) out.f_gap = f.value(x) - *inst.f_star;
  };

  if (method == "dnm") {
    if (!inst.oracle) throw InvalidProblemError("method needs an oracle");
    DnmResult res = dnm_solve(*inst.oracle, inst.x0);
    out.iterations_to_region = res.damped_iterations;
    finish_smooth(*inst.oracle, res.x, res.trace);
    return out;
  }
  if (method == "pfs" || method == "pcpfs") {
    if (!inst.oracle) throw InvalidProblemError("method needs an oracle");
    PfsConfig config;
    config.max_iterations = 2000000;  // ladders legitimately reach ~1e6
    PfsResult res =
        method == "pfs"
            ? pfs_solve(*inst.oracle, inst.x0,
                        consts.value_or(PathConstants::pfs()), config)
            : pcpfs_solve(*inst.oracle, inst.x0,
                          consts.value_or(PathConstants::pcpfs()), config);
    out.iterations_to_region = res.report.path_iterations;
    finish_smooth(*inst.oracle, res.x, res.report.trace);
    return out;
  }
  if (method == "crnm") {
    if (!inst.strong) {
      throw InvalidProblemError("method needs Lipschitz-strong constants");
    }
    CrnmConfig config;
    config.f_star = inst.f_star;
    CrnmResult res = crnm_solve(*inst.strong, inst.x0, config);
    double threshold = quadratic_region_threshold(
        inst.strong->sigma_strong(), inst.strong->hess_lipschitz());
    out.iterations_to_region = res.trace.iterations();
    if (inst.f_star) {
      for (std::size_t k = 0; k < res.trace.rows.size(); ++k) {
        if (res.trace.rows[k].f - *inst.f_star <= threshold) {
          out.iterations_to_region = static_cast<int>(k);
          break;
        }
      }
    }
    finish_smooth(*inst.strong, res.x, res.trace);
    return out;
  }
  if (method == "multistage") {
    if (!inst.strong) {
      throw InvalidProblemError("method needs Lipschitz-strong constants");
    }
    MultistageConfig config;
    config.f_star = inst.f_star;
    MultistageResult res = multistage_solve(
        make_crnm_stage_method(calibrated_c), *inst.strong, inst.x0, config);
    out.iterations_to_region = res.trace.iterations();
    finish_smooth(*inst.strong, res.x, res.trace);
    return out;
  }
  throw InvalidProblemError("unknown method: " + method);
}

MethodOutcome run_feasibility_method(
    const std::string& method, const BuiltInstance& bi,
    const std::optional<PathConstants>& consts) {
  const FeasibilityInstance& inst = *bi.feas;
  MethodOutcome out;
  if (method == "dual-exact") {
    double gamma = consts ? consts->gamma : 0.5;
    DualExactResult res = dual_pathfollow_exact(inst, gamma);
    out.iterations_to_region =
        static_cast<int>(res.sigma_sequence.size()) - 1;
    out.total_iterations = res.trace.iterations();
    out.final_lambda = res.trace.back().lambda;
    out.certificate = res.residual;
    return out;
  }
  FeasibilitySolver solver = method == "feas-dnm" ? FeasibilitySolver::Dnm
                                                  : FeasibilitySolver::Pfs;
  FeasibilityResult res = feasibility_via_dual(inst, solver);
  out.iterations_to_region = count_phase(
      res.trace, solver == FeasibilitySolver::Pfs ? "path" : "damped");
  out.total_iterations = res.trace.iterations();
  out.final_lambda = res.dual_lambda;
  out.certificate = res.residual;
  if (res.trace.status != "feasible") out.solve_status = res.trace.status;
  return out;
}

bool is_feasibility_method(const std::string& method) {
  return method == "feas-dnm" || method == "feas-pfs" ||
         method == "dual-exact";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  static const std::vector<std::string> known = {
      "dnm",  "pfs",        "pcpfs",    "crnm",
      "multistage", "feas-dnm", "feas-pfs", "dual-exact"};
  if (spec.instance.empty()) throw InvalidProblemError("no instance named");
  if (spec.methods.empty()) throw InvalidProblemError("no methods listed");
  for (const auto& m : spec.methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw InvalidProblemError("unknown method: " + m);
    }
  }

  ExperimentResult result;
  result.spec = spec;

  // The multistage rate constant is calibrated once per experiment (on the
  // smallest ladder point) and inflated so per-stage halving holds away
  // from the calibration trajectory; it must not vary along a ladder.
  double calibrated_c = 1.0;
  bool wants_multistage =
      std::find(spec.methods.begin(), spec.methods.end(), "multistage") !=
      spec.methods.end();
  if (wants_multistage && !spec.sweep_values.empty()) {
    double smallest =
        *std::min_element(spec.sweep_values.begin(), spec.sweep_values.end());
    BuiltInstance bi = build_instance(spec, smallest);
    if (!bi.zoo_inst.strong || !bi.zoo_inst.f_star) {
      throw InvalidProblemError(
          "multistage calibration needs strong constants and the optimum");
    }
    CrnmConfig config;
    config.f_star = bi.zoo_inst.f_star;
    CrnmResult cal = crnm_solve(*bi.zoo_inst.strong, bi.zoo_inst.x0, config);
    double r0 = bi.zoo_inst.x_star
                    ? (bi.zoo_inst.x0 - *bi.zoo_inst.x_star).norm()
                    : (bi.zoo_inst.x0 - cal.x).norm();
    calibrated_c = 4.0 * calibrate_rate_constant(
                             cal.trace, *bi.zoo_inst.f_star,
                             bi.zoo_inst.strong->hess_lipschitz(), r0);
  }

  for (double value : spec.sweep_values) {
    for (const auto& method : spec.methods) {
      ExperimentRow row;
      row.instance = spec.instance;
      row.method = method;
      row.sweep_value = value;
      auto row_start = std::chrono::steady_clock::now();
      try {
        BuiltInstance bi = build_instance(spec, value);
        row.scale_x = bi.scale_x;
        MethodOutcome out =
            is_feasibility_method(method)
                ? run_feasibility_method(method, bi, spec.constants)
                : run_oracle_method(method, bi, spec.constants, calibrated_c);
        row.iterations_to_region = out.iterations_to_region;
        row.total_iterations = out.total_iterations;
        row.final_lambda = out.final_lambda;
        row.certificate = out.certificate;
        row.f_gap = out.f_gap;
        row.wall_s = seconds_since(row_start);
        row.status = row.wall_s > spec.row_timeout_s ? "timeout"
                     : out.solve_status.empty()      ? "ok"
                                                     : out.solve_status;
      } catch (const std::exception& ex) {
        row.wall_s = seconds_since(row_start);
        std::string what = ex.what();
        for (char& ch : what) {
          if (ch == ',' || ch == '\n') ch = ';';
        }
        row.status = "error:" + what;
      }
      result.rows.push_back(std::move(row));
    }
  }

  for (const auto& method : spec.methods) {
    std::vector<double> xs, ys;
    for (const auto& row : result.rows) {
      if (row.method == method && row.status == "ok" && row.scale_x > 0.0 &&
          row.iterations_to_region > 0) {
        xs.push_back(row.scale_x);
        ys.push_back(static_cast<double>(row.iterations_to_region));
      }
    }
    if (xs.size() >= 6) {
      result.slopes[method] = fit_loglog_slope(xs, ys);
    }
  }
  return result;
}

std::string ExperimentResult::csv() const {
  std::ostringstream os;
  os << "version,instance,method,sweep,sweep_value,scale_x,"
        "iterations_to_region,total_iterations,final_lambda,certificate,"
        "f_gap,status\n";
  for (const auto& row : rows) {
    os << "1," << csv_field(row.instance) << ',' << csv_field(row.method)
       << ',' << csv_field(spec.sweep) << ',' << format_double(row.sweep_value)
       << ',' << format_double(row.scale_x) << ',' << row.iterations_to_region
       << ',' << row.total_iterations << ',' << format_double(row.final_lambda)
       << ',' << format_double(row.certificate) << ','
       << format_double(row.f_gap) << ',' << csv_field(row.status) << '\n';
  }
  return os.str();
}

std::string ExperimentResult::json_summary() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["name"] = spec.name;
  j["instance"] = spec.instance;
  j["sweep"] = spec.sweep;
  j["seed"] = spec.seed;
  nlohmann::json js = nlohmann::json::object();
  for (const auto& [method, fit] : slopes) {
    js[method] = {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"points_used", fit.points_used},
                  {"max_residual", fit.max_residual}};
  }
  j["slopes"] = js;
  nlohmann::json jr = nlohmann::json::array();
  for (const auto& row : rows) {
    jr.push_back({{"method", row.method},
                  {"sweep_value", row.sweep_value},
                  {"scale_x", row.scale_x},
                  {"iterations_to_region", row.iterations_to_region},
                  {"total_iterations", row.total_iterations},
                  {"status", row.status},
                  {"wall_s", row.wall_s}});
  }
  j["rows"] = jr;
  return j.dump(2);
}

void write_experiment_files(const ExperimentResult& result,
                            const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path base(out_dir);
  std::ofstream csv_out(base / (result.spec.name + ".csv"));
  csv_out << result.csv();
  std::ofstream json_out(base / (result.spec.name + ".json"));
  json_out << result.json_summary();
}

}  // namespace scopt
