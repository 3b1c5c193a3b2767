#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "acma/solver.hpp"

namespace acma {

struct MaximalConfig {
  std::vector<int> schedule{2, 4, 8, 16, 32};
  SolverConfig solver;
};

struct MaximalIterate {
  int k = 0;
  Solution solution;
  double lipschitz = 0.0;
  double change = 0.0;         // max |u_k - u_prev| (0 for the first)
  double monotone_defect = 0.0;  // max (u_prev - u_k), should be <= tau
};

struct MaximalRun {
  std::vector<MaximalIterate> iterates;
  ScalarField limit;          // last iterate
  ScalarField extrapolated;   // Richardson in 1/k from the last two iterates
  double lipschitz_estimate = 0.0;
  double tau = 0.0;
  bool monotone = true;
};

/// Solves det A(u_k) = det A(rho) / k^n with u_k = phi on the boundary for each
/// k of the schedule, warm-starting from the previous iterate.
/// Throws ScheduleTooShort.
MaximalRun solve_maximal(std::shared_ptr<const MAOperator> op, const ScalarField& phi,
                         const MaximalConfig& config = {});

/// max |u_i - u_j| / h over axis-neighbouring active points.
double discrete_lipschitz(const ScalarField& u);

struct Ball {
  Vec center;
  double radius = 0.0;
  bool contains(const Vec& x) const { return (x - center).norm() < radius; }
};

enum class ProbeVerdict { holds, violation };
const char* to_string(ProbeVerdict v);

struct ProbeReport {
  ProbeVerdict verdict = ProbeVerdict::holds;
  int trials = 0;
  int violations = 0;
  int skipped = 0;          // probes that failed the psh check and were redrawn
  double max_excess = 0.0;  // largest probe - u observed
  int inner_points = 0;     // grid points covered by probe balls, summed
};

/// Random psh quadratic probe q (Hermitian part with eigenvalues in [0.1, 1])
/// lowered to touch u from below outside a random ball B inside `region`;
/// a violation is q + c > u + tau somewhere in B.
ProbeReport maximality_probe(const MAOperator& op, const ScalarField& u, int trials, std::uint64_t seed,
                             double tau, const std::optional<Ball>& region = std::nullopt);

/// For each subregion U, strictly psh quadratic probes are lowered to touch u
/// from below on U; contact at least 2h inside U is a violation.
ProbeReport fj_harmonic_check(const MAOperator& op, const ScalarField& u, const std::vector<Ball>& subregions,
                              int probes, std::uint64_t seed, double tau);

struct LocalityReport {
  std::vector<ProbeVerdict> local;
  ProbeVerdict global = ProbeVerdict::holds;
  ProbeVerdict verdict = ProbeVerdict::holds;  // holds iff every local run holds
  bool consistent = true;                      // verdict == global
};

LocalityReport locality_check(const MAOperator& op, const ScalarField& u, const std::vector<Ball>& cover,
                              int trials, std::uint64_t seed, double tau);

/// Overlapping balls covering the interior of the unit ball: centre ball plus
/// `count - 1` balls around the coordinate directions.
std::vector<Ball> default_cover(int dim, int count);

struct HolderResult {
  std::vector<double> h;
  std::vector<double> beta;
  std::vector<std::vector<std::pair<double, double>>> samples;  // (t, u(P) - u(P - t n)) per grid
};

struct HolderOptions {
  int n = 2;
  double epsilon = 0.0;
  MaximalConfig maximal;
};

/// Boundary data -|x - P|^{1+alpha} on the unit ball, P = e_1; fits beta in
/// u(P) - u(P - t e_1) ~ c t^beta over dyadic t in [h, 1/2].
HolderResult holder_experiment(double alpha, const std::vector<double>& hs, const HolderOptions& options = {});

}  // namespace acma
