#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acma/domains.hpp"
#include "acma/field.hpp"
#include "acma/ma_operator.hpp"

namespace acma {

/// Dirichlet problem det A(u) = f in Omega, u = phi on the boundary.
struct MAProblem {
  std::shared_ptr<const MAOperator> op;
  ScalarField rho;
  ScalarField f;
  ScalarField phi;  // must carry a boundary trace

  const GridDomain& grid() const { return op->grid(); }
  const GridPtr& grid_ptr() const { return op->grid_ptr(); }

  static MAProblem make(std::shared_ptr<const MAOperator> op, const PointFunction& f, const PointFunction& phi);
  /// Validates f >= -1e-12 and finiteness of the boundary trace.
  void validate() const;
};

struct SolverConfig {
  double tol = 1e-8;            // on max |log det A - log f| and on the final step
  int max_newton = 60;
  double damping = 0.5;         // backtracking factor
  double margin_floor = 0.0;    // iterates keep lambda_min A > floor
  double regularization_delta = 0.0;
  std::vector<double> delta_schedule;  // decreasing; overrides regularization_delta when set
  double linear_tol = 1e-2;     // relative, inexact Newton
  int max_linear = 4000;
  /// Upper bounds on the step length of the first Newton iterations
  /// (entries beyond the list are 1).
  std::vector<double> initial_damping;
  std::optional<ScalarField> initial_guess;
  bool verbose = false;
};

struct NewtonRecord {
  int iteration = 0;
  double step_length = 0.0;     // accepted damping factor
  double update = 0.0;          // max |delta u|
  double residual_max = 0.0;    // max |log det A - log f| after the step
  double residual_l2 = 0.0;
  double margin = 0.0;          // lambda_min A after the step
  int linear_iterations = 0;
  double delta = 0.0;
};

struct Solution {
  ScalarField u;
  int iterations = 0;
  std::vector<NewtonRecord> history;
  double log_residual = 0.0;   // max |log det A - log f_delta|
  double residual = 0.0;       // max |det A - f_delta|
  double margin = 0.0;
  double delta = 0.0;
  double barrier_a = 0.0;
  ScalarField lower;
  ScalarField upper;
};

Solution solve_dirichlet(const MAProblem& problem, const SolverConfig& config = {});

enum class ComparisonVerdict { hypotheses_unmet, holds, violation };
const char* to_string(ComparisonVerdict v);

struct ComparisonReport {
  ComparisonVerdict verdict = ComparisonVerdict::hypotheses_unmet;
  double max_excess = 0.0;        // max over interior of u - v
  double density_gap = 0.0;       // worst det A(v) - det A(u) on {A(v) > 0}
  double boundary_gap = 0.0;      // worst u - v on the band
  std::size_t worst_point = 0;
};

/// Checks "det A(u) >= det A(v) on {A(v) > 0} and u <= v on the boundary
/// imply u <= v" on a pair of grid fields. `hyp_tol` is relative for the
/// densities and absolute for the boundary; `tau` is the conclusion tolerance.
ComparisonReport comparison_check(const MAOperator& op, const ScalarField& u, const ScalarField& v,
                                  double hyp_tol, double tau);

struct EstimateReport {
  double tau = 0.0;
  double scale = 1.0;
  double m_rho = 0.0;
  double f_root_max = 0.0;       // ||f^{1/n}||_inf
  double boundary_min = 0.0;     // inf phi on the boundary
  double boundary_max = 0.0;
  double uniform_violation = 0.0;  // worst violation of the uniform bound (<= 0 means holds)
  double barrier_violation = 0.0;  // worst violation of lower - tau <= u <= upper + tau
  bool uniform_holds = false;
  bool barrier_holds = false;
  double max_gradient = 0.0;
  double max_hessian = 0.0;      // largest eigenvalue of the coordinate Hessian
  double psh_margin = 0.0;
};

/// tau = 10 (tol + h^2) scale with scale = max(1, max|phi|).
EstimateReport estimate_report(const Solution& solution, const MAProblem& problem, double tol);

}  // namespace acma
