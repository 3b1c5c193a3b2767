#include "acma/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

namespace acma {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct Evaluation {
  std::vector<HMat> a;
  Eigen::VectorXd residual;  // log det A - log f
  double margin = std::numeric_limits<double>::infinity();
  double max = 0.0;
  double l2 = 0.0;
  bool positive = true;
};

Evaluation evaluate(const MAOperator& op, const ScalarField& u, const std::vector<double>& log_f,
                    double floor) {
  const long count = static_cast<long>(op.grid().interior().size());
  Evaluation ev;
  ev.a.resize(static_cast<std::size_t>(count));
  ev.residual.resize(count);
  double margin = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : margin) schedule(static)
  for (long k = 0; k < count; ++k) {
    HMat a = op.a_matrix_slot(u, static_cast<int>(k));
    double m = min_eigenvalue(a);
    margin = std::min(margin, m);
    ev.residual[k] = m > 0.0 ? std::log(hermitian_det(a)) - log_f[static_cast<std::size_t>(k)]
                             : std::numeric_limits<double>::infinity();
    ev.a[static_cast<std::size_t>(k)] = a;
  }
  ev.margin = margin;
  ev.positive = margin > floor && std::isfinite(margin);
  if (ev.positive) {
    ev.max = ev.residual.cwiseAbs().maxCoeff();
    ev.l2 = count > 0 ? ev.residual.norm() / std::sqrt(static_cast<double>(count)) : 0.0;
  } else {
    ev.max = ev.l2 = std::numeric_limits<double>::infinity();
  }
  return ev;
}

// Jacobian of u_I -> log det A(u) with the band closure eliminated.
SpMat assemble_jacobian(const MAOperator& op, const std::vector<HMat>& a) {
  const GridDomain& g = op.grid();
  const int d = g.real_dim();
  const double h = g.h();
  const double h2 = h * h;
  const long count = static_cast<long>(g.interior().size());
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) {
    Mat second;
    Vec first;
    op.linearization(hermitian_inverse(a[static_cast<std::size_t>(k)]), static_cast<int>(k), second, first);
    const long i = static_cast<long>(g.interior()[static_cast<std::size_t>(k)]);
    auto& row = rows[static_cast<std::size_t>(k)];
    row.reserve(64);
    auto add = [&](long j, double c) {
      const std::size_t idx = static_cast<std::size_t>(j);
      int slot = g.interior_slot(idx);
      if (slot >= 0) {
        row.emplace_back(slot, c);
        return;
      }
      const BandStencil& st = g.band_stencils()[static_cast<std::size_t>(g.band_slot(idx))];
      for (int q = 0; q < st.corners; ++q) {
        row.emplace_back(g.interior_slot(st.corner_index[q]), -st.kappa * st.corner_weight[q] * c);
      }
    };
    double center = 0.0;
    for (int p = 0; p < d; ++p) {
      const long sp = g.stride(p);
      center -= 2.0 * second(p, p) / h2;
      add(i + sp, second(p, p) / h2 + first[p] / (2.0 * h));
      add(i - sp, second(p, p) / h2 - first[p] / (2.0 * h));
      for (int q = p + 1; q < d; ++q) {
        const long sq = g.stride(q);
        const double c = second(p, q) / (2.0 * h2);
        add(i + sp + sq, c);
        add(i - sp - sq, c);
        add(i + sp - sq, -c);
        add(i - sp + sq, -c);
      }
    }
    row.emplace_back(static_cast<int>(k), center);
    std::sort(row.begin(), row.end());
    std::size_t w = 0;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (w > 0 && row[w - 1].first == row[r].first) {
        row[w - 1].second += row[r].second;
      } else {
        row[w++] = row[r];
      }
    }
    row.resize(w);
  }
  SpMat jac(count, count);
  Eigen::VectorXi nnz(count);
  for (long k = 0; k < count; ++k) nnz[k] = static_cast<int>(rows[static_cast<std::size_t>(k)].size());
  jac.reserve(nnz);
  for (long k = 0; k < count; ++k) {
    for (const auto& [col, val] : rows[static_cast<std::size_t>(k)]) jac.insert(k, col) = val;
  }
  jac.makeCompressed();
  return jac;
}

std::vector<double> log_density(const MAProblem& problem, double delta) {
  const auto& in = problem.grid().interior();
  std::vector<double> out(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) out[k] = std::log(std::max(problem.f[in[k]], delta));
  return out;
}

ScalarField regularized(const ScalarField& f, double delta) {
  ScalarField out = f;
  const GridDomain& g = f.grid();
  for (std::size_t i : g.interior()) out[i] = std::max(out[i], delta);
  for (std::size_t i : g.band()) out[i] = std::max(out[i], delta);
  return out;
}

// One Newton run at fixed density; u is updated in place.
void newton(const MAProblem& problem, const SolverConfig& config, double delta, int& iteration,
            std::vector<double>& damping_caps, ScalarField& u, Solution& sol) {
  const MAOperator& op = *problem.op;
  const std::vector<double> log_f = log_density(problem, delta);
  apply_band_closure(u, problem.phi);
  Evaluation ev = evaluate(op, u, log_f, config.margin_floor);
  if (!ev.positive) {
    throw Error(ErrorCode::lost_positivity, "initial guess is not strictly psh");
  }
  double last_update = std::numeric_limits<double>::infinity();
  while (true) {
    if (ev.max <= config.tol && last_update <= config.tol) break;
    if (iteration >= config.max_newton) {
      throw Error(ErrorCode::newton_stalled,
                  "no convergence in " + std::to_string(config.max_newton) + " Newton iterations (residual " +
                      std::to_string(ev.max) + ")");
    }
    ++iteration;
    SpMat jac = assemble_jacobian(op, ev.a);
    Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(config.linear_tol);
    solver.setMaxIterations(config.max_linear);
    solver.compute(jac);
    Eigen::VectorXd step = solver.solve(-ev.residual);
    if (solver.info() != Eigen::Success && solver.error() > 0.5) {
      throw Error(ErrorCode::newton_stalled, "linear solve failed (relative residual " +
                                                  std::to_string(solver.error()) + ")");
    }
    double t = 1.0;
    if (!damping_caps.empty()) {
      t = std::min(t, damping_caps.front());
      damping_caps.erase(damping_caps.begin());
    }
    const Eigen::VectorXd base = u.interior_values();
    int non_decreasing = 0;
    int halvings = 0;
    bool accepted = false;
    Evaluation trial;
    while (!accepted) {
      u.set_interior_values(base + t * step);
      apply_band_closure(u, problem.phi);
      trial = evaluate(op, u, log_f, config.margin_floor);
      if (!trial.positive) {
        if (++halvings > 40) throw Error(ErrorCode::lost_positivity, "margin floor unattainable along the step");
        t *= config.damping;
        continue;
      }
      if (trial.l2 < ev.l2 || trial.max <= 0.1 * config.tol) {
        accepted = true;
        break;
      }
      if (ev.max <= config.tol) {
        // Residual already at the rounding floor: keep the current iterate.
        u.set_interior_values(base);
        apply_band_closure(u, problem.phi);
        trial = evaluate(op, u, log_f, config.margin_floor);
        t = 0.0;
        accepted = true;
        break;
      }
      if (++non_decreasing >= 5) {
        u.set_interior_values(base);
        apply_band_closure(u, problem.phi);
        throw Error(ErrorCode::newton_stalled, "no residual decrease in 5 damped steps");
      }
      t *= config.damping;
    }
    last_update = t * step.cwiseAbs().maxCoeff();
    ev = std::move(trial);
    NewtonRecord rec;
    rec.iteration = iteration;
    rec.step_length = t;
    rec.update = last_update;
    rec.residual_max = ev.max;
    rec.residual_l2 = ev.l2;
    rec.margin = ev.margin;
    rec.linear_iterations = static_cast<int>(solver.iterations());
    rec.delta = delta;
    sol.history.push_back(rec);
    if (config.verbose) {
      std::fprintf(stderr, "newton %2d  t=%.3g  |du|=%.3e  res=%.3e  margin=%.3e  lin=%d\n", iteration, t,
                   last_update, ev.max, ev.margin, rec.linear_iterations);
    }
    if (t == 0.0) break;
  }
  sol.log_residual = ev.max;
  sol.margin = ev.margin;
}

}  // namespace

MAProblem MAProblem::make(std::shared_ptr<const MAOperator> op, const PointFunction& f, const PointFunction& phi) {
  const GridPtr& g = op->grid_ptr();
  ScalarField rho = ScalarField::sample(g, g->rho().value);
  ScalarField ff = ScalarField::sample(g, f);
  ScalarField pp = ScalarField::sample(g, phi);
  return MAProblem{std::move(op), std::move(rho), std::move(ff), std::move(pp)};
}

void MAProblem::validate() const {
  if (!op) throw Error(ErrorCode::invalid_argument, "problem has no operator");
  for (std::size_t i : grid().interior()) {
    if (!(f[i] >= -1e-12)) throw Error(ErrorCode::invalid_argument, "density f must be nonnegative and finite");
  }
  if (!phi.has_trace()) throw Error(ErrorCode::invalid_argument, "boundary data carries no trace");
  for (double v : phi.trace()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "boundary data is not finite");
  }
}

Solution solve_dirichlet(const MAProblem& problem, const SolverConfig& config) {
  problem.validate();
  double f_min = std::numeric_limits<double>::infinity();
  for (std::size_t i : problem.grid().interior()) f_min = std::min(f_min, problem.f[i]);

  std::vector<double> deltas;
  if (f_min > 0.0) {
    deltas.push_back(config.delta_schedule.empty() ? config.regularization_delta : 0.0);
  } else if (!config.delta_schedule.empty()) {
    deltas = config.delta_schedule;
  } else if (config.regularization_delta > 0.0) {
    deltas.push_back(config.regularization_delta);
  } else {
    throw Error(ErrorCode::degenerate_rhs, "f vanishes somewhere; set regularization_delta or delta_schedule");
  }
  for (double dl : deltas) {
    if (f_min <= 0.0 && !(dl > 0.0)) throw Error(ErrorCode::degenerate_rhs, "delta schedule must stay positive");
  }

  const MAOperator& op = *problem.op;
  BarrierPair barriers = build_barriers(op, problem.rho, problem.phi, regularized(problem.f, deltas.front()));
  Solution sol{barriers.lower, 0, {}, 0.0, 0.0, 0.0, 0.0, barriers.a, barriers.lower, barriers.upper};
  ScalarField u = config.initial_guess ? *config.initial_guess : barriers.lower;
  if (!u.grid().same_layout(problem.grid())) throw Error(ErrorCode::grid_mismatch, "initial guess grid differs");
  std::vector<double> caps = config.initial_damping;
  int iteration = 0;
  for (double delta : deltas) {
    newton(problem, config, delta, iteration, caps, u, sol);
    sol.delta = delta;
  }
  u.trace() = problem.phi.trace();
  sol.u = u;
  sol.iterations = iteration;
  ScalarField fd = regularized(problem.f, sol.delta);
  sol.residual = ma_residual(op, u, fd).max;
  return sol;
}

const char* to_string(ComparisonVerdict v) {
  switch (v) {
    case ComparisonVerdict::hypotheses_unmet: return "hypotheses_unmet";
    case ComparisonVerdict::holds: return "holds";
    case ComparisonVerdict::violation: return "VIOLATION";
  }
  return "hypotheses_unmet";
}

ComparisonReport comparison_check(const MAOperator& op, const ScalarField& u, const ScalarField& v,
                                  double hyp_tol, double tau) {
  const GridDomain& g = op.grid();
  if (!u.grid().same_layout(g) || !v.grid().same_layout(g)) {
    throw Error(ErrorCode::grid_mismatch, "comparison fields live on different grids");
  }
  ComparisonReport rep;
  rep.density_gap = -std::numeric_limits<double>::infinity();
  rep.boundary_gap = -std::numeric_limits<double>::infinity();
  bool densities_ok = true;
  const auto& in = g.interior();
  for (std::size_t k = 0; k < in.size(); ++k) {
    HMat av = op.a_matrix_slot(v, static_cast<int>(k));
    if (!(min_eigenvalue(av) > 0.0)) continue;
    double dv = hermitian_det(av);
    double du = hermitian_det(op.a_matrix_slot(u, static_cast<int>(k)));
    double gap = dv - du;
    rep.density_gap = std::max(rep.density_gap, gap);
    if (gap > hyp_tol * std::max(1.0, std::abs(dv))) densities_ok = false;
  }
  bool boundary_ok = true;
  for (std::size_t k = 0; k < g.band().size(); ++k) {
    double gap = u.boundary_value(static_cast<int>(k)) - v.boundary_value(static_cast<int>(k));
    rep.boundary_gap = std::max(rep.boundary_gap, gap);
    if (gap > hyp_tol) boundary_ok = false;
  }
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i : in) {
    double e = u[i] - v[i];
    if (e > rep.max_excess) {
      rep.max_excess = e;
      rep.worst_point = i;
    }
  }
  if (!densities_ok || !boundary_ok) {
    rep.verdict = ComparisonVerdict::hypotheses_unmet;
  } else {
    rep.verdict = rep.max_excess <= tau ? ComparisonVerdict::holds : ComparisonVerdict::violation;
  }
  return rep;
}

EstimateReport estimate_report(const Solution& solution, const MAProblem& problem, double tol) {
  const GridDomain& g = problem.grid();
  const MAOperator& op = *problem.op;
  const ScalarField& u = solution.u;
  EstimateReport rep;
  rep.boundary_min = std::numeric_limits<double>::infinity();
  rep.boundary_max = -std::numeric_limits<double>::infinity();
  for (double v : problem.phi.trace()) {
    rep.boundary_min = std::min(rep.boundary_min, v);
    rep.boundary_max = std::max(rep.boundary_max, v);
  }
  rep.scale = std::max({1.0, std::abs(rep.boundary_min), std::abs(rep.boundary_max)});
  rep.tau = 10.0 * (tol + g.h() * g.h()) * rep.scale;
  rep.m_rho = m_rho(op, problem.rho);
  const double n = g.complex_dim();
  for (std::size_t i : g.interior()) {
    rep.f_root_max = std::max(rep.f_root_max, std::pow(std::max(problem.f[i], solution.delta), 1.0 / n));
  }
  rep.uniform_violation = -std::numeric_limits<double>::infinity();
  rep.barrier_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i : g.interior()) {
    double lower = rep.f_root_max * rep.m_rho * problem.rho[i] + rep.boundary_min;
    rep.uniform_violation = std::max({rep.uniform_violation, lower - u[i], u[i] - rep.boundary_max});
    rep.barrier_violation = std::max({rep.barrier_violation, solution.lower[i] - u[i], u[i] - solution.upper[i]});
    rep.max_gradient = std::max(rep.max_gradient, u.gradient(i).norm());
    Eigen::SelfAdjointEigenSolver<Mat> es(u.hessian(i), Eigen::EigenvaluesOnly);
    rep.max_hessian = std::max(rep.max_hessian, es.eigenvalues().maxCoeff());
  }
  rep.uniform_holds = rep.uniform_violation <= rep.tau;
  rep.barrier_holds = rep.barrier_violation <= rep.tau;
  rep.psh_margin = psh_classify(op, u).margin;
  return rep;
}

}  // namespace acma
