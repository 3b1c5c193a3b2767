#include <cmath>

#include "acma/maximal.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace acma;
using acma::testing::error_code;
using acma::testing::frame_of;

namespace {

struct Setup {
  Frame frame;
  GridPtr grid;
  std::shared_ptr<const MAOperator> op;
};

Setup ball_setup(double eps, double h) {
  Frame frame = frame_of(AlmostComplexStructure::sheared(2, eps));
  GridPtr grid = acma::testing::ball_grid(frame, h);
  return {frame, grid, std::make_shared<const MAOperator>(grid, frame)};
}

PointFunction x1() {
  return [](const Vec& x) { return x[0]; };
}

// Cached h = 1/4 run for phi = x_1 on the standard ball.
const MaximalRun& x1_run(const Setup& s) {
  static const MaximalRun run = solve_maximal(s.op, ScalarField::sample(s.grid, x1()));
  return run;
}

const Setup& standard_coarse() {
  static const Setup s = ball_setup(0.0, 0.25);
  return s;
}

const Setup& standard_medium() {
  static const Setup s = ball_setup(0.0, 0.125);
  return s;
}

}  // namespace

TEST_CASE("scheme limit for phi = x1 on the ball") {
  const Setup& s = standard_coarse();
  const MaximalRun& run = x1_run(s);
  const double h = 0.25;
  ScalarField exact = ScalarField::sample(s.grid, x1());
  CHECK(run.iterates.size() == 5);
  CHECK(max_interior_difference(run.limit, exact) <= 2.0 * (h * h + 1.0 / 32));
  CHECK(run.monotone);
  // u_k = x1 + rho / k up to discretization, so the 1/k extrapolation is close to x1.
  CHECK(max_interior_difference(run.extrapolated, exact) <= 0.5 * h * h);
  ComparisonReport rep = comparison_check(*s.op, run.limit, exact, 1e-6, run.tau);
  CHECK(rep.verdict == ComparisonVerdict::holds);
  CHECK(discrete_lipschitz(exact) == doctest::Approx(1.0));
}

TEST_CASE("iterates sit between the shifted limit and the limit") {
  const Setup& s = standard_coarse();
  const MaximalRun& run = x1_run(s);
  ScalarField rho = ScalarField::sample(s.grid, s.grid->rho().value);
  for (const MaximalIterate& it : run.iterates) {
    for (std::size_t i : s.grid->interior()) {
      double u0 = run.extrapolated[i];
      CHECK(u0 + rho[i] / it.k - 1.0 / it.k - run.tau <= it.solution.u[i]);
      CHECK(it.solution.u[i] <= u0 + run.tau);
    }
  }
}

TEST_CASE("pluriharmonic-in-one-variable data |z1|^2") {
  const Setup& s = standard_coarse();
  PointFunction z1 = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; };
  MaximalRun run = solve_maximal(s.op, ScalarField::sample(s.grid, z1));
  CHECK(max_interior_difference(run.limit, ScalarField::sample(s.grid, z1)) <= 2.0 * (0.0625 + 1.0 / 32));
  CHECK(run.monotone);
}

TEST_CASE("sheared scheme has a decreasing Cauchy tail") {
  Setup s = ball_setup(0.05, 0.25);
  MaximalRun run = solve_maximal(s.op, ScalarField::sample(s.grid, x1()));
  CHECK(run.monotone);
  for (std::size_t k = 2; k < run.iterates.size(); ++k) {
    CHECK(run.iterates[k].change < run.iterates[k - 1].change);
  }
  double lo = 1e300, hi = 0.0;
  for (const auto& it : run.iterates) {
    lo = std::min(lo, it.lipschitz);
    hi = std::max(hi, it.lipschitz);
  }
  CHECK(hi <= 2.5 * lo);  // bounded across k; the k = 2 iterate carries slope 1 + 2/k
}

TEST_CASE("limit does not depend on the schedule") {
  const Setup& s = standard_coarse();
  MaximalConfig other;
  other.schedule = {3, 6, 12, 24, 48};
  MaximalRun a = x1_run(s);
  MaximalRun b = solve_maximal(s.op, ScalarField::sample(s.grid, x1()), other);
  CHECK(max_interior_difference(a.limit, b.limit) <= 10.0 * a.tau);
  CHECK(max_interior_difference(a.extrapolated, b.extrapolated) <= 1e-6);
}

TEST_CASE("schedule validation") {
  const Setup& s = standard_coarse();
  ScalarField phi = ScalarField::sample(s.grid, x1());
  MaximalConfig one;
  one.schedule = {8};
  CHECK(error_code([&] { solve_maximal(s.op, phi, one); }) == ErrorCode::schedule_too_short);
  MaximalConfig bad;
  bad.schedule = {4, 2};
  CHECK(error_code([&] { solve_maximal(s.op, phi, bad); }) == ErrorCode::invalid_argument);
}

TEST_CASE("maximality probe and F(J)-harmonic check agree on test fields") {
  const Setup& s = standard_medium();
  const double tau = 0.125 * 0.125;
  auto cover = default_cover(4, 4);
  struct Case {
    const char* name;
    PointFunction fn;
    ProbeVerdict expected;
  } cases[] = {
      {"x1", x1(), ProbeVerdict::holds},
      {"|z|^2", acma::testing::normsq(), ProbeVerdict::violation},
      {"|z|^2 - 1", [](const Vec& x) { return x.squaredNorm() - 1.0; }, ProbeVerdict::violation},
      {"Re z1^2", [](const Vec& x) { return x[0] * x[0] - x[1] * x[1]; }, ProbeVerdict::holds},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    ScalarField u = ScalarField::sample(s.grid, c.fn);
    ProbeReport m = maximality_probe(*s.op, u, 100, 3, tau);
    ProbeReport fj = fj_harmonic_check(*s.op, u, cover, 25, 3, tau);
    CHECK(m.verdict == c.expected);
    CHECK(fj.verdict == c.expected);
    CHECK(m.trials == 100);
  }
}

TEST_CASE("locality check") {
  const Setup& s = standard_medium();
  const double tau = 0.125 * 0.125;
  auto cover = default_cover(4, 4);
  LocalityReport ok = locality_check(*s.op, ScalarField::sample(s.grid, x1()), cover, 25, 1, tau);
  CHECK(ok.verdict == ProbeVerdict::holds);
  CHECK(ok.global == ProbeVerdict::holds);
  CHECK(ok.consistent);
  ScalarField bowl = ScalarField::sample(s.grid, [](const Vec& x) { return x.squaredNorm() - 1.0; });
  LocalityReport bad = locality_check(*s.op, bowl, cover, 25, 1, tau);
  CHECK(bad.verdict == ProbeVerdict::violation);
  CHECK(bad.global == ProbeVerdict::violation);
  CHECK(bad.consistent);
}

TEST_CASE("scheme limit passes the probes under two covers") {
  const Setup& s = standard_medium();
  MaximalRun run = solve_maximal(s.op, ScalarField::sample(s.grid, x1()));
  const double tau = 0.125 * 0.125;
  CHECK(maximality_probe(*s.op, run.limit, 50, 2, tau).verdict == ProbeVerdict::holds);
  CHECK(fj_harmonic_check(*s.op, run.limit, default_cover(4, 5), 10, 2, tau).verdict == ProbeVerdict::holds);
  LocalityReport a = locality_check(*s.op, run.limit, default_cover(4, 4), 15, 2, tau);
  LocalityReport b = locality_check(*s.op, run.limit, default_cover(4, 9), 15, 2, tau);
  CHECK(a.verdict == b.verdict);
  CHECK(a.verdict == ProbeVerdict::holds);
}

TEST_CASE("probes are reproducible from the seed") {
  const Setup& s = standard_coarse();
  ScalarField u = ScalarField::sample(s.grid, acma::testing::normsq());
  ProbeReport a = maximality_probe(*s.op, u, 30, 42, 1e-3);
  ProbeReport b = maximality_probe(*s.op, u, 30, 42, 1e-3);
  CHECK(a.violations == b.violations);
  CHECK(a.max_excess == b.max_excess);
  CHECK(a.inner_points == b.inner_points);
}

TEST_CASE("probes on a sheared structure") {
  Setup s = ball_setup(0.05, 0.25);
  ScalarField bowl = ScalarField::sample(s.grid, acma::testing::normsq());
  ProbeReport m = maximality_probe(*s.op, bowl, 40, 8, 0.0625);
  CHECK(m.verdict == ProbeVerdict::violation);
}

TEST_CASE("boundary exponent of the maximal solution") {
  HolderResult lip = holder_experiment(1.0, {0.25, 0.125});
  CHECK(lip.beta.back() >= 0.9);
  HolderResult half = holder_experiment(0.5, {0.25, 0.125});
  for (double b : half.beta) CHECK(b <= 0.85);
  CHECK(std::abs(half.beta[0] - half.beta[1]) <= 0.05);
  CHECK(error_code([] { holder_experiment(0.0, {0.25}); }) == ErrorCode::invalid_argument);
}
