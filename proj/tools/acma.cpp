// acma: command-line driver for the solver, the maximal scheme, verification,
// disk probes and refinement benchmarks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "acma/disks.hpp"
#include "acma/field_io.hpp"
#include "acma/maximal.hpp"
#include "experiment.hpp"
#include "json.hpp"
#include "run_config.hpp"

using namespace acma;
using namespace acma::cli;
using nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, other = 1, config = 2, solver = 3, violation = 4 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::invalid_argument: return config;
    case ErrorCode::io_error:
    case ErrorCode::parse_error:
    case ErrorCode::grid_mismatch: return other;
    default: return solver;
  }
}

struct Run {
  RunConfig config;
  std::filesystem::path out;
  std::ostringstream summary;
};

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ordered_json grid_json(const GridDomain& g) {
  return {{"n", g.complex_dim()}, {"h", g.h()}, {"interior", g.interior().size()}, {"band", g.band().size()}};
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  for (const auto& [section, keys] : c.values())
    for (const auto& [key, value] : keys) j[section][key] = value;
  return j;
}

ordered_json history_json(const Solution& s) {
  ordered_json h = ordered_json::array();
  for (const NewtonRecord& r : s.history) {
    h.push_back({{"iteration", r.iteration},
                 {"step_length", r.step_length},
                 {"update", r.update},
                 {"residual_max", r.residual_max},
                 {"margin", r.margin},
                 {"linear_iterations", r.linear_iterations},
                 {"delta", r.delta}});
  }
  return h;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScalarField sample(const Experiment& ex, const std::string& name) {
  return ScalarField::sample(ex.grid, named_field(name, ex));
}

MAProblem make_problem(const Experiment& ex, const RunConfig& c) {
  return MAProblem{ex.op, sample(ex, "rho"), sample(ex, c.text("data", "f")), sample(ex, c.text("data", "phi"))};
}

int cmd_solve(Run& run) {
  const RunConfig& c = run.config;
  auto t0 = std::chrono::steady_clock::now();
  Experiment ex = build_experiment(c, c.real("domain", "h"));
  MAProblem problem = make_problem(ex, c);
  SolverConfig sc = c.solver();
  Solution sol = solve_dirichlet(problem, sc);
  EstimateReport est = estimate_report(sol, problem, sc.tol);
  export_field(sol.u, (run.out / "u.csv").string());

  ordered_json j;
  j["command"] = "solve";
  j["config"] = config_json(c);
  j["grid"] = grid_json(*ex.grid);
  j["solver"] = {{"iterations", sol.iterations},
                 {"log_residual", sol.log_residual},
                 {"residual", sol.residual},
                 {"margin", sol.margin},
                 {"delta", sol.delta},
                 {"barrier_a", sol.barrier_a},
                 {"history", history_json(sol)}};
  j["estimates"] = {{"tau", est.tau},
                    {"m_rho", est.m_rho},
                    {"uniform_violation", est.uniform_violation},
                    {"barrier_violation", est.barrier_violation},
                    {"uniform_holds", est.uniform_holds},
                    {"barrier_holds", est.barrier_holds},
                    {"psh_margin", est.psh_margin}};
  double error = std::nan("");
  if (!c.text("data", "exact").empty()) {
    error = max_interior_difference(sol.u, sample(ex, c.text("data", "exact")));
    j["error_vs_exact"] = error;
  }
  write_json(run.out / "diagnostics.json", j);

  auto& s = run.summary;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %s\n", "grid", ("n=" + std::to_string(ex.grid->complex_dim()) + " h=" +
                                                          format_double(ex.grid->h()) + " interior=" +
                                                          std::to_string(ex.grid->interior().size())).c_str());
  s << line;
  std::snprintf(line, sizeof line, "%-22s %d\n", "newton iterations", sol.iterations);
  s << line;
  std::snprintf(line, sizeof line, "%-22s %.3e\n", "max |log det A - log f|", sol.log_residual);
  s << line;
  std::snprintf(line, sizeof line, "%-22s %.3e\n", "psh margin", est.psh_margin);
  s << line;
  std::snprintf(line, sizeof line, "%-22s %s (%.3e)\n", "uniform bound", est.uniform_holds ? "holds" : "VIOLATION",
                est.uniform_violation);
  s << line;
  std::snprintf(line, sizeof line, "%-22s %s (%.3e)\n", "barrier sandwich", est.barrier_holds ? "holds" : "VIOLATION",
                est.barrier_violation);
  s << line;
  if (std::isfinite(error)) {
    std::snprintf(line, sizeof line, "%-22s %.3e (%.3f h^2)\n", "max error vs exact", error,
                  error / (ex.grid->h() * ex.grid->h()));
    s << line;
  }
  std::snprintf(line, sizeof line, "%-22s %.1f s\n", "wall time", seconds_since(t0));
  s << line;
  return est.uniform_holds && est.barrier_holds ? ok : violation;
}

double probe_tau(const RunConfig& c, double h) {
  std::string t = c.text("maximal", "probe_tau");
  return t.empty() ? h * h : c.real("maximal", "probe_tau");
}

int cmd_maximal(Run& run) {
  const RunConfig& c = run.config;
  auto t0 = std::chrono::steady_clock::now();
  Experiment ex = build_experiment(c, c.real("domain", "h"));
  ScalarField phi = sample(ex, c.text("data", "phi"));
  MaximalRun mr = solve_maximal(ex.op, phi, c.maximal());
  ordered_json j;
  j["command"] = "maximal";
  j["config"] = config_json(c);
  j["grid"] = grid_json(*ex.grid);
  ordered_json its = ordered_json::array();
  for (const MaximalIterate& it : mr.iterates) {
    export_field(it.solution.u, (run.out / ("u_k" + std::to_string(it.k) + ".csv")).string());
    its.push_back({{"k", it.k},
                   {"change", it.change},
                   {"lipschitz", it.lipschitz},
                   {"monotone_defect", it.monotone_defect},
                   {"newton_iterations", it.solution.iterations}});
  }
  export_field(mr.limit, (run.out / "limit.csv").string());
  export_field(mr.extrapolated, (run.out / "extrapolated.csv").string());
  j["iterates"] = its;
  j["tau"] = mr.tau;
  j["monotone"] = mr.monotone;
  j["lipschitz_estimate"] = mr.lipschitz_estimate;

  const double tau = probe_tau(c, ex.grid->h());
  const std::uint64_t seed = c.seed();
  const int dim = ex.grid->real_dim();
  auto cover = default_cover(dim, static_cast<int>(c.integer("maximal", "cover_balls")));
  ProbeReport m = maximality_probe(*ex.op, mr.limit, static_cast<int>(c.integer("maximal", "probe_trials")), seed, tau);
  ProbeReport fj = fj_harmonic_check(*ex.op, mr.limit, cover, static_cast<int>(c.integer("maximal", "fj_probes")),
                                     seed, tau);
  LocalityReport loc = locality_check(*ex.op, mr.limit, cover, static_cast<int>(c.integer("maximal", "fj_probes")),
                                      seed, tau);
  auto probe_json = [](const ProbeReport& r) {
    return ordered_json{{"verdict", to_string(r.verdict)},
                        {"trials", r.trials},
                        {"violations", r.violations},
                        {"redrawn", r.skipped},
                        {"max_excess", r.max_excess},
                        {"covered_points", r.inner_points}};
  };
  j["probe_tau"] = tau;
  j["maximality"] = probe_json(m);
  j["fj_harmonic"] = probe_json(fj);
  j["locality"] = {{"verdict", to_string(loc.verdict)}, {"global", to_string(loc.global)}, {"consistent", loc.consistent}};
  if (!c.text("data", "exact").empty()) {
    j["error_vs_exact"] = max_interior_difference(mr.limit, sample(ex, c.text("data", "exact")));
  }
  write_json(run.out / "diagnostics.json", j);

  auto& s = run.summary;
  char line[256];
  std::snprintf(line, sizeof line, "%6s %12s %10s %14s %8s\n", "k", "|u_k-u_prev|", "Lipschitz", "monotone_def", "newton");
  s << line;
  for (const MaximalIterate& it : mr.iterates) {
    std::snprintf(line, sizeof line, "%6d %12.4e %10.4f %14.3e %8d\n", it.k, it.change, it.lipschitz, it.monotone_defect,
                  it.solution.iterations);
    s << line;
  }
  s << "monotone: " << (mr.monotone ? "yes" : "NO") << "   maximality: " << to_string(m.verdict)
    << "   F(J)-harmonic: " << to_string(fj.verdict) << "   locality: " << to_string(loc.verdict)
    << (loc.consistent ? " (consistent)" : " (INCONSISTENT)") << '\n';
  if (j.contains("error_vs_exact")) s << "max error vs exact: " << j["error_vs_exact"].get<double>() << '\n';
  std::snprintf(line, sizeof line, "wall time %.1f s\n", seconds_since(t0));
  s << line;
  bool pass = mr.monotone && m.verdict == ProbeVerdict::holds && fj.verdict == ProbeVerdict::holds &&
              loc.verdict == ProbeVerdict::holds && loc.consistent;
  return pass ? ok : violation;
}

int cmd_verify(Run& run) {
  const RunConfig& c = run.config;
  const std::string input = c.text("verify", "input");
  if (input.empty()) throw Error(ErrorCode::config_error, "verify.input is required");
  Experiment ex = build_experiment(c, c.real("domain", "h"));
  MAProblem problem = make_problem(ex, c);
  ScalarField u = import_field(input, ex.grid);
  SolverConfig sc = c.solver();
  BarrierPair barriers = build_barriers(*ex.op, problem.rho, problem.phi, problem.f);
  Solution sol{u, 0, {}, 0.0, 0.0, 0.0, 0.0, barriers.a, barriers.lower, barriers.upper};
  EquationResidual res = ma_residual(*ex.op, u, problem.f);
  sol.residual = res.max;
  EstimateReport est = estimate_report(sol, problem, sc.tol);
  PshReport psh = psh_classify(*ex.op, u);
  // det A(lower) >= f = det A(u) and lower = u on the boundary.
  ComparisonReport cmp = comparison_check(*ex.op, barriers.lower, u, 1e-6, est.tau);
  const double boundary_gap = [&] {
    double g = 0.0;
    for (std::size_t b = 0; b < ex.grid->band().size(); ++b) {
      g = std::max(g, std::abs(u.boundary_value(static_cast<int>(b)) - problem.phi.trace()[b]));
    }
    return g;
  }();
  // The density residual is judged relative to the discretization error.
  const bool residual_ok = res.max <= est.tau * std::max(1.0, problem.f.max_abs());

  ordered_json j;
  j["command"] = "verify";
  j["input"] = input;
  j["grid"] = grid_json(*ex.grid);
  j["residual_max"] = res.max;
  j["residual_ok"] = residual_ok;
  j["psh"] = {{"margin", psh.margin}, {"verdict", to_string(psh.verdict)}};
  j["comparison_lower_barrier"] = {{"verdict", to_string(cmp.verdict)}, {"max_excess", cmp.max_excess}};
  j["uniform"] = {{"holds", est.uniform_holds}, {"violation", est.uniform_violation}};
  j["barrier"] = {{"holds", est.barrier_holds}, {"violation", est.barrier_violation}};
  j["boundary_gap"] = boundary_gap;
  j["tau"] = est.tau;
  write_json(run.out / "verify.json", j);

  bool pass = residual_ok && psh.verdict != PshVerdict::not_psh && cmp.verdict != ComparisonVerdict::violation &&
              est.uniform_holds && est.barrier_holds;
  auto& s = run.summary;
  s << "residual max        " << res.max << (residual_ok ? "" : "  (too large)") << '\n';
  s << "psh                 " << to_string(psh.verdict) << " (margin " << psh.margin << ")\n";
  s << "comparison          " << to_string(cmp.verdict) << '\n';
  s << "uniform bound       " << (est.uniform_holds ? "holds" : "VIOLATION") << '\n';
  s << "barrier sandwich    " << (est.barrier_holds ? "holds" : "VIOLATION") << '\n';
  s << "verdict             " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? ok : violation;
}

int cmd_disks(Run& run) {
  const RunConfig& c = run.config;
  Experiment ex = build_experiment(c, c.real("domain", "h"));
  const int dim = ex.grid->real_dim();
  std::vector<double> coords = c.reals("disks", "point");
  Vec p = Vec::Zero(dim);
  if (!coords.empty()) {
    if (static_cast<int>(coords.size()) != dim) throw Error(ErrorCode::config_error, "disks.point has wrong length");
    for (int a = 0; a < dim; ++a) p[a] = coords[static_cast<std::size_t>(a)];
  }
  PointFunction u = named_field(c.text("disks", "field"), ex);
  const double radius = c.real("disks", "radius");
  const double tol = c.real("disks", "tol");
  const int samples = static_cast<int>(c.integer("disks", "samples"));
  DiskPshReport rep = psh_check_disks(u, ex.frame, p, samples, radius, c.seed(), tol);
  HMat a = a_matrix(ex.frame, u, p);
  double lambda_min = min_eigenvalue(a);

  Vec v1 = 2.0 * ex.frame(p).col(0).real();
  Disk disk = make_disk(ex.structure, p, {v1}, radius, tol);
  export_disk_csv(disk, (run.out / "disk.csv").string());
  double oracle_gap = std::abs(disk_laplacian_probe(u, disk) - 4.0 * a(0, 0).real());

  ordered_json j;
  j["command"] = "disks";
  j["point"] = std::vector<double>(p.data(), p.data() + dim);
  j["margin"] = rep.margin;
  j["values"] = rep.values;
  j["max_disk_residual"] = rep.max_residual;
  j["lambda_min"] = lambda_min;
  j["first_direction_gap"] = oracle_gap;
  j["disk"] = {{"iterations", disk.iterations()}, {"contraction", disk.contraction()}, {"residual", disk.residual()}};
  write_json(run.out / "diagnostics.json", j);

  // Disk margin is the minimum of 4 (A zeta, zeta) over sampled unit directions.
  const double agree_tol = 1e-3 * std::max(1.0, std::abs(lambda_min));
  bool agree = std::abs(rep.margin) <= agree_tol || (rep.margin > 0) == (lambda_min > 0);
  run.summary << "disk psh margin     " << rep.margin << "  (" << samples << " directions)\n"
              << "4 lambda_min A(u)   " << 4.0 * lambda_min << '\n'
              << "first-direction gap " << oracle_gap << '\n'
              << "max disk residual   " << rep.max_residual << '\n'
              << "signs agree         " << (agree ? "yes" : "NO") << '\n';
  return agree ? ok : violation;
}

int cmd_bench(Run& run) {
  const RunConfig& c = run.config;
  const std::string exact_name = c.text("data", "exact");
  if (exact_name.empty()) throw Error(ErrorCode::config_error, "bench needs data.exact");
  std::vector<double> hs = c.reals("bench", "h_list");
  if (hs.empty()) throw Error(ErrorCode::config_error, "bench.h_list is empty");
  ordered_json rows = ordered_json::array();
  std::ofstream csv(run.out / "bench.csv");
  csv << "h,interior,max_error,error_over_h2,order,newton_iterations,log_residual\n";
  char line[256];
  std::snprintf(line, sizeof line, "%10s %10s %12s %10s %8s %8s %10s\n", "h", "interior", "max error", "err/h^2",
                "order", "newton", "time [s]");
  run.summary << line;
  double prev_err = 0.0, prev_h = 0.0;
  for (double h : hs) {
    auto t0 = std::chrono::steady_clock::now();
    Experiment ex = build_experiment(c, h);
    MAProblem problem = make_problem(ex, c);
    Solution sol = solve_dirichlet(problem, c.solver());
    double err = max_interior_difference(sol.u, sample(ex, exact_name));
    double gh = ex.grid->h();
    double order = prev_h > 0.0 ? std::log(prev_err / err) / std::log(prev_h / gh) : std::nan("");
    rows.push_back({{"h", gh},
                    {"interior", ex.grid->interior().size()},
                    {"max_error", err},
                    {"error_over_h2", err / (gh * gh)},
                    {"order", std::isfinite(order) ? ordered_json(order) : ordered_json(nullptr)},
                    {"newton_iterations", sol.iterations}});
    csv << format_double(gh) << ',' << ex.grid->interior().size() << ',' << format_double(err) << ','
        << format_double(err / (gh * gh)) << ',' << (std::isfinite(order) ? format_double(order) : "") << ','
        << sol.iterations << ',' << format_double(sol.log_residual) << '\n';
    std::snprintf(line, sizeof line, "%10.5f %10zu %12.4e %10.4f %8s %8d %10.1f\n", gh, ex.grid->interior().size(), err,
                  err / (gh * gh), std::isfinite(order) ? format_double(std::round(order * 100) / 100).c_str() : "-",
                  sol.iterations, seconds_since(t0));
    run.summary << line;
    prev_err = err;
    prev_h = gh;
  }
  ordered_json j;
  j["command"] = "bench";
  j["config"] = config_json(c);
  j["rows"] = rows;
  write_json(run.out / "diagnostics.json", j);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acma: complex Monge-Ampere solver on almost complex manifolds"};
  std::string config_path;
  std::string out_dir = "acma_out";
  long seed = -1;
  int threads = 0;
  app.add_option("--config", config_path, "INI configuration file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed (overrides run.seed)");
  app.add_option("--threads", threads, "worker threads (0 keeps the default)");
  app.require_subcommand(1);
  std::string command;
  const std::pair<const char*, const char*> commands[] = {
      {"solve", "solve the Dirichlet problem det A(u) = f"},
      {"maximal", "maximal psh limit by the vanishing right-hand side scheme"},
      {"verify", "check an exported field against residual, psh and estimate tests"},
      {"disks", "build J-holomorphic disks and compare probes with A(u)"},
      {"bench", "convergence table over domain h_list"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&command, name] { command = name; });
  }
  app.footer("Environment: ACMA_<SECTION>_<KEY> overrides a config key, e.g. ACMA_DOMAIN_H=0.0625.\n"
             "Exit codes: 0 ok, 1 other error, 2 config error, 3 solver failure, 4 verification violation.");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : config;
  }

  try {
    Run run{RunConfig::load(config_path), out_dir, {}};
    if (seed >= 0) run.config.set("run", "seed", std::to_string(seed));
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    std::filesystem::create_directories(run.out);
    int rc = ok;
    if (command == "solve") rc = cmd_solve(run);
    if (command == "maximal") rc = cmd_maximal(run);
    if (command == "verify") rc = cmd_verify(run);
    if (command == "disks") rc = cmd_disks(run);
    if (command == "bench") rc = cmd_bench(run);
    std::ofstream(run.out / "summary.txt") << run.summary.str();
    std::cout << run.summary.str();
    return rc;
  } catch (const Error& e) {
    std::cerr << "acma: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "acma: " << e.what() << '\n';
    return other;
  }
}
