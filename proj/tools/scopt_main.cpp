#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "scopt/bench.hpp"
#include "scopt/cubic.hpp"
#include "scopt/errors.hpp"
#include "scopt/feasibility.hpp"
#include "scopt/newton.hpp"
#include "scopt/pathfollow.hpp"
#include "scopt/predcorr.hpp"
#include "scopt/problem_io.hpp"
#include "scopt/scalar.hpp"
#include "scopt/zoo.hpp"

namespace {

using namespace scopt;

std::string default_out_dir() {
  const char* env = std::getenv("SCOPT_OUT_DIR");
  return env && *env ? env : ".";
}

PathConstants constants_from_flags(const std::string& variant,
                                   std::optional<double> beta,
                                   std::optional<double> gamma) {
  PathConstants c = variant == "pcpfs"        ? PathConstants::pcpfs()
                    : variant == "barrier-pc" ? PathConstants::barrier_pc()
                                              : PathConstants::pfs();
  if (beta) c.beta = *beta;
  if (gamma) c.gamma = *gamma;
  return c;
}

int run_verify_suite(const std::vector<std::string>& modules) {
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << "verify " << name << ": " << (ok ? "pass" : "FAIL") << "\n";
    all_ok = all_ok && ok;
  };
  for (const std::string& mod : modules) {
    try {
      if (mod == "scalar") {
        bool ok = true;
        for (double tau : {0.01, 0.3, 0.7, 2.5}) {
          ok = ok && std::abs(omega_star_prime(omega_prime(tau)) - tau) <
                         1e-12 * (1.0 + tau);
          ok = ok && std::abs(omega_star_inverse(omega_star(
                                  tau / (1.0 + tau))) -
                              tau / (1.0 + tau)) < 1e-10;
        }
        report(mod, ok);
      } else if (mod == "constants") {
        bool ok = validate_constants(PathConstants::pfs()).ok &&
                  validate_constants(PathConstants::pcpfs()).ok &&
                  validate_constants(PathConstants::barrier_pc()).ok;
        report(mod, ok);
      } else if (mod == "newton") {
        auto f = make_scalar_xlnx();
        Eigen::VectorXd x(1);
        x << 2.0;
        Eigen::VectorXd next = damped_newton_step(*f, x);
        report(mod, std::abs(next(0) - 1.0) < 1e-12);
      } else if (mod == "cubic") {
        ProblemInstance inst = zoo("lse");
        CrnmResult res = crnm_solve(*inst.strong, inst.x0,
                                    {.max_iterations = 2000,
                                     .f_star = inst.f_star});
        report(mod, inst.f_star.has_value() &&
                        res.trace.back().f - *inst.f_star <
                            quadratic_region_threshold(
                                inst.strong->sigma_strong(),
                                inst.strong->hess_lipschitz()) +
                                1e-12);
      } else if (mod == "pathfollow") {
        ProblemInstance inst = zoo("lse");
        PfsResult res = pfs_solve(*inst.oracle, inst.x0);
        report(mod, newton_decrement(*inst.oracle, res.x) < 1e-8);
      } else if (mod == "feasibility") {
        FeasibilityInstance fi;
        fi.barrier = make_box_barrier(3);
        fi.a = Eigen::MatrixXd::Zero(1, 3);
        fi.a(0, 0) = 1.0;
        fi.b = Eigen::VectorXd::Constant(1, 0.5);
        FeasibilityResult res =
            feasibility_via_dual(fi, FeasibilitySolver::Dnm);
        report(mod, res.residual <= 1e-8);
      } else {
        report(mod, false);
      }
    } catch (const std::exception& ex) {
      std::cout << "verify " << mod << " raised: " << ex.what() << "\n";
      all_ok = false;
    }
  }
  return all_ok ? 0 : 1;
}

void print_trace_summary(const SolveTrace& trace) {
  std::cout << "method: " << trace.method << "\n"
            << "status: " << trace.status << "\n"
            << "iterations: " << trace.iterations() << "\n";
  if (!trace.rows.empty()) {
    const TraceRow& last = trace.back();
    std::cout << "final f: " << format_double(last.f) << "\n"
              << "final lambda: " << format_double(last.lambda) << "\n";
  }
}

void maybe_write_trace(const SolveTrace& trace, const std::string& out) {
  if (out.empty()) return;
  std::ofstream os(out);
  trace.write_csv(os, true);
  std::cout << "trace written to " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"second-order convex optimization toolkit"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on one instance");
  std::string solve_problem = "lse";
  std::string solve_method = "dnm";
  std::string solve_variant = "pfs";
  std::optional<double> solve_beta, solve_gamma;
  std::string solve_out;
  bool solve_verify = false;
  ZooParams solve_params;
  solve->add_option("--problem", solve_problem,
                    "zoo instance name or problem file path");
  solve->add_option("--method", solve_method,
                    "dnm|pfs|pcpfs|crnm|multistage");
  solve->add_option("--consts", solve_variant,
                    "constants variant: pfs|pcpfs|barrier-pc");
  solve->add_option("--beta", solve_beta, "centering tolerance override");
  solve->add_option("--gamma", solve_gamma, "path step override");
  solve->add_option("--seed", solve_params.seed, "instance seed");
  solve->add_option("--n", solve_params.n, "dimension");
  solve->add_option("--m", solve_params.m, "row count (lse, logistic)");
  solve->add_option("--mu", solve_params.mu, "smoothing (lse)");
  solve->add_option("--sigma", solve_params.sigma, "ridge weight");
  solve->add_option("--x0-scale", solve_params.x0_scale, "start distance");
  solve->add_option("--decades", solve_params.decades, "valley length");
  double solve_rate_c = 0.0;
  solve->add_option("--rate-c", solve_rate_c,
                    "multistage rate constant; skips self-calibration");
  solve->add_option("--out", solve_out, "write the trace CSV here");
  solve->add_flag("--verify", solve_verify,
                  "run the touched modules' invariant smoke suite");

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment spec");
  std::string bench_spec_path;
  std::string bench_out = default_out_dir();
  std::optional<std::uint64_t> bench_seed;
  bool bench_verify = false;
  bench->add_option("--spec", bench_spec_path, "experiment JSON file")
      ->required();
  bench->add_option("--out", bench_out, "output directory");
  bench->add_option("--seed", bench_seed, "override the spec seed");
  bench->add_flag("--verify", bench_verify,
                  "run the touched modules' invariant smoke suite");

  // paramsearch
  auto* ps = app.add_subcommand("paramsearch",
                                "map the step-size admissibility region");
  int ps_grid = 400;
  double ps_beta_max = 0.1, ps_gamma_max = 0.25;
  std::string ps_out;
  bool ps_verify = false;
  ps->add_option("--grid", ps_grid, "points per axis");
  ps->add_option("--beta-max", ps_beta_max, "beta range upper end");
  ps->add_option("--gamma-max", ps_gamma_max, "gamma range upper end");
  ps->add_option("--out", ps_out, "feasible-region CSV path");
  ps->add_flag("--verify", ps_verify,
               "run the touched modules' invariant smoke suite");

  // lp-reduce
  auto* lpr = app.add_subcommand(
      "lp-reduce", "embed a standard-form LP pair as a feasibility problem");
  std::string lpr_path;
  std::string lpr_out;
  bool lpr_solve = false;
  lpr->add_option("--lp", lpr_path, "LP text file")->required();
  lpr->add_option("--out", lpr_out, "write the embedded system here");
  lpr->add_flag("--solve", lpr_solve,
                "solve the embedding and recover the LP solution");

  // feas
  auto* feas = app.add_subcommand("feas", "solve a feasibility instance");
  int feas_n = 4;
  double feas_eps = 0.1;
  std::string feas_barrier = "box";
  std::string feas_solver = "dnm";
  double feas_gamma = 0.5;
  bool feas_compare = false;
  std::string feas_row;
  double feas_rhs = std::numeric_limits<double>::quiet_NaN();
  feas->add_option("--n", feas_n, "dimension");
  feas->add_option("--barrier", feas_barrier, "box|simplex");
  feas->add_option("--eps", feas_eps,
                   "depth of the default constraint x_1 = 1 - eps");
  feas->add_option("--a-row", feas_row,
                   "comma-separated single constraint row (overrides --eps)");
  feas->add_option("--b", feas_rhs, "right-hand side for --a-row");
  feas->add_option("--solver", feas_solver, "dnm|pfs|exact");
  feas->add_option("--gamma", feas_gamma, "step for the exact dual path");
  feas->add_flag("--compare", feas_compare, "run all three strategies");

  // audit
  auto* audit = app.add_subcommand(
      "audit", "finite-difference self-concordance audit of a zoo oracle");
  std::string audit_problem = "lse";
  int audit_points = 25;
  int audit_dirs = 8;
  std::uint64_t audit_seed = 1;
  double audit_tol = 1e-2;
  audit->add_option("--problem", audit_problem, "zoo instance name");
  audit->add_option("--points", audit_points, "sample points");
  audit->add_option("--directions", audit_dirs, "directions per point");
  audit->add_option("--seed", audit_seed, "sampling seed");
  audit->add_option("--tol", audit_tol, "relative tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (solve->parsed()) {
      ProblemInstance inst;
      if (std::filesystem::exists(solve_problem)) {
        ProblemFile file = load_problem_file(solve_problem);
        file.scalars["seed"] = static_cast<double>(solve_params.seed);
        inst = instance_from_file(file);
      } else {
        inst = zoo(solve_problem, solve_params);
      }
      PathConstants consts =
          constants_from_flags(solve_variant, solve_beta, solve_gamma);
      SolveTrace trace;
      if (solve_method == "dnm") {
        trace = dnm_solve(*inst.oracle, inst.x0).trace;
      } else if (solve_method == "pfs") {
        if (!solve_beta && !solve_gamma) consts = PathConstants::pfs();
        trace = std::move(pfs_solve(*inst.oracle, inst.x0, consts)
                              .report.trace);
      } else if (solve_method == "pcpfs") {
        if (!solve_beta && !solve_gamma) consts = PathConstants::pcpfs();
        consts.variant = PathVariant::Pcpfs;
        trace = std::move(pcpfs_solve(*inst.oracle, inst.x0, consts)
                              .report.trace);
      } else if (solve_method == "crnm") {
        if (!inst.strong) throw InvalidProblemError("instance lacks (sigma, H)");
        CrnmConfig config;
        config.f_star = inst.f_star;
        trace = crnm_solve(*inst.strong, inst.x0, config).trace;
      } else if (solve_method == "multistage") {
        if (!inst.strong) throw InvalidProblemError("instance lacks (sigma, H)");
        if (!inst.f_star) throw InvalidProblemError("instance lacks f*");
        // The restart plan needs the empirical rate envelope, which only a
        // run that actually reaches the region can certify; pass --rate-c
        // to reuse a constant calibrated elsewhere (for instance on a
        // smaller member of the same family).
        double c;
        if (solve_rate_c > 0.0) {
          c = solve_rate_c;
        } else {
          CrnmConfig cal_config;
          cal_config.f_star = inst.f_star;
          CrnmResult cal = crnm_solve(*inst.strong, inst.x0, cal_config);
          double r0 = inst.x_star ? (inst.x0 - *inst.x_star).norm()
                                  : (inst.x0 - cal.x).norm();
          c = 4.0 * calibrate_rate_constant(cal.trace, *inst.f_star,
                                            inst.strong->hess_lipschitz(),
                                            r0);
        }
        MultistageConfig config;
        config.f_star = inst.f_star;
        trace = multistage_solve(make_crnm_stage_method(c), *inst.strong,
                                 inst.x0, config)
                    .trace;
      } else {
        std::cerr << "unknown method: " << solve_method << "\n";
        return 2;
      }
      print_trace_summary(trace);
      maybe_write_trace(trace, solve_out);
      if (solve_verify) {
        return run_verify_suite({"scalar", "constants", "newton",
                                 solve_method == "crnm" ||
                                         solve_method == "multistage"
                                     ? "cubic"
                                     : "pathfollow"});
      }
      return 0;
    }

    if (bench->parsed()) {
      std::ifstream in(bench_spec_path);
      if (!in) throw InvalidProblemError("cannot read " + bench_spec_path);
      std::stringstream buf;
      buf << in.rdbuf();
      ExperimentSpec spec = experiment_from_json(buf.str());
      if (bench_seed) spec.seed = *bench_seed;
      ExperimentResult result = run_experiment(spec);
      write_experiment_files(result, bench_out);
      for (const auto& [method, fit] : result.slopes) {
        std::cout << method << " slope: " << format_double(fit.slope)
                  << " over " << fit.points_used << " points\n";
      }
      std::cout << "rows: " << result.rows.size() << "\n";
      if (bench_verify) {
        return run_verify_suite({"scalar", "constants", "newton",
                                 "pathfollow"});
      }
      return 0;
    }

    if (ps->parsed()) {
      ParamSearchResult result =
          param_search(uniform_grid(0.0, ps_beta_max, ps_grid),
                       uniform_grid(0.0, ps_gamma_max, ps_grid));
      std::cout << "argmax objective: " << format_double(result.best_objective)
                << " at beta = " << format_double(result.best_beta)
                << ", gamma = " << format_double(result.best_gamma) << "\n";
      std::string out =
          ps_out.empty()
              ? (std::filesystem::path(default_out_dir()) / "paramsearch.csv")
                    .string()
              : ps_out;
      std::ofstream os(out);
      write_param_search_csv(result, os);
      std::cout << "region written to " << out << "\n";
      if (ps_verify) return run_verify_suite({"scalar", "constants"});
      return 0;
    }

    if (lpr->parsed()) {
      LpData lp = load_lp(lpr_path);
      SelfDualEmbedding emb = lp_to_feasibility(lp.a, lp.b, lp.c);
      std::cout << "embedded " << emb.m << "x" << emb.n
                << " program into dimension " << 2 * emb.n << " with "
                << emb.q_matrix.rows() << " homogeneous rows\n";
      if (!lpr_out.empty()) {
        ProblemFile file;
        file.name = "lp-embedding";
        file.matrices["Q"] = emb.q_matrix;
        file.matrices["A"] = emb.reduced_a;
        file.vectors["b"] = emb.reduced_b;
        file.matrices["row_transform"] = emb.row_transform;
        file.vectors["col_permutation"] =
            emb.col_permutation.cast<double>();
        file.scalars["n"] = emb.n;
        file.scalars["m"] = emb.m;
        save_problem_file(file, lpr_out);
        std::cout << "embedding written to " << lpr_out << "\n";
      }
      if (lpr_solve) {
        FeasibilityInstance inst = embedding_instance(emb);
        FeasibilityConfig config;
        config.residual_only = true;
        config.residual_tol = 1e-10;
        FeasibilityResult res =
            feasibility_via_dual(inst, FeasibilitySolver::Dnm, config);
        LpRecovery rec = recover_lp_solution(emb, res.x);
        std::cout << "status: " << res.trace.status << "\n"
                  << "iterations: " << res.trace.iterations() << "\n"
                  << "residual: " << format_double(res.residual) << "\n"
                  << "tau: " << format_double(rec.tau) << "\n"
                  << "objective: " << format_double(lp.c.dot(rec.x)) << "\n"
                  << "duality gap: " << format_double(rec.gap) << "\n";
      }
      return 0;
    }

    if (feas->parsed()) {
      FeasibilityInstance inst;
      if (feas_barrier == "box") {
        inst.barrier = make_box_barrier(feas_n);
      } else if (feas_barrier == "simplex") {
        inst.barrier = recentered_barrier(
            make_simplex_barrier(feas_n),
            Eigen::VectorXd::Constant(feas_n, 1.0 / (feas_n + 1)));
      } else {
        std::cerr << "unknown barrier: " << feas_barrier << "\n";
        return 2;
      }
      if (!feas_row.empty()) {
        std::vector<double> entries;
        std::stringstream ss(feas_row);
        std::string tok;
        while (std::getline(ss, tok, ',')) entries.push_back(std::stod(tok));
        if (static_cast<int>(entries.size()) != feas_n) {
          std::cerr << "--a-row needs " << feas_n << " entries\n";
          return 2;
        }
        inst.a = Eigen::Map<Eigen::RowVectorXd>(entries.data(),
                                                feas_n);
        if (std::isnan(feas_rhs)) {
          std::cerr << "--a-row needs --b\n";
          return 2;
        }
        inst.b = Eigen::VectorXd::Constant(1, feas_rhs);
      } else {
        inst.a = Eigen::MatrixXd::Zero(1, feas_n);
        inst.a(0, 0) = 1.0;
        inst.b = Eigen::VectorXd::Constant(1, 1.0 - feas_eps);
        inst.eps_depth = feas_eps;
      }
      if (feas_compare) {
        StrategyReport report = strategy_comparison(inst, feas_gamma);
        std::cout << "nu: " << format_double(report.nu) << "\n";
        for (const auto& row : report.rows) {
          std::cout << row.solver << ": " << row.iterations
                    << " iterations (order " << format_double(row.predicted)
                    << "), residual " << format_double(row.residual) << "\n";
        }
        return 0;
      }
      if (feas_solver == "exact") {
        DualExactResult res = dual_pathfollow_exact(inst, feas_gamma);
        std::cout << "outer iterations: "
                  << res.sigma_sequence.size() - 1 << "\n"
                  << "multiplier: " << format_double(res.multiplier) << "\n"
                  << "residual: " << format_double(res.residual) << "\n";
        return 0;
      }
      FeasibilitySolver solver = feas_solver == "pfs"
                                     ? FeasibilitySolver::Pfs
                                     : FeasibilitySolver::Dnm;
      FeasibilityResult res = feasibility_via_dual(inst, solver);
      print_trace_summary(res.trace);
      std::cout << "residual: " << format_double(res.residual) << "\n";
      return 0;
    }

    if (audit->parsed()) {
      ProblemInstance inst = zoo(audit_problem, {.seed = audit_seed});
      const ScOracle& f = inst.oracle ? *inst.oracle
                          : inst.barrier
                              ? static_cast<const ScOracle&>(*inst.barrier)
                              : throw InvalidProblemError("no oracle");
      std::vector<Eigen::VectorXd> points;
      points.push_back(inst.x0);
      for (int i = 1; i < audit_points; ++i) {
        points.push_back(inst.x0 * (1.0 - static_cast<double>(i) /
                                              audit_points));
      }
      AuditReport report =
          audit_self_concordance(f, points, audit_dirs, audit_seed, audit_tol);
      std::cout << "checked: " << report.checked << "\n"
                << "worst ratio: " << format_double(report.worst_ratio)
                << "\n"
                << "worst location: " << report.worst_location << "\n"
                << (report.ok ? "audit passed" : "audit FAILED") << "\n";
      return report.ok ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
