#include <cmath>

#include "acma/domains.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace acma;
using acma::testing::ball_grid;

namespace {

Frame standard_frame(int n) { return split_frame(AlmostComplexStructure::standard(n), Vec::Zero(2 * n)); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io_error;
}

}  // namespace

TEST_CASE("interior count of the unit disk matches brute force") {
  Frame frame = standard_frame(1);
  auto grid = ball_grid(frame, 0.25);
  std::size_t brute = 0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      double x = -1.25 + 0.25 * i, y = -1.25 + 0.25 * j;
      if (x * x + y * y < 1.0) ++brute;
    }
  CHECK(grid->interior().size() == brute);
  CHECK(grid->counts()[0] == 11);
}

TEST_CASE("grid_build errors") {
  Frame f2 = standard_frame(2);
  auto far = DefiningFunction::custom("far", [](const Vec& x) { return x.squaredNorm() + 10.0; });
  CHECK(code_of([&] { grid_build(far, Box::cube(4, 1.25), 0.25, f2); }) == ErrorCode::empty_domain);
  auto hyper = DefiningFunction::custom("indefinite", [](const Vec& x) {
    return x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3] - 1.0;
  });
  CHECK(code_of([&] { grid_build(hyper, Box::cube(4, 1.25), 0.25, f2); }) == ErrorCode::not_strictly_psh);
  // Two lobes {x^2 + y^4 < y^2 / 2} pinched at the origin, where grad rho = 0;
  // rho is strictly subharmonic (Laplacian 1 + 12 y^2).
  auto pinched = DefiningFunction::custom("pinched", [](const Vec& x) {
    return x[0] * x[0] - 0.5 * x[1] * x[1] + std::pow(x[1], 4);
  });
  Frame f1 = standard_frame(1);
  CHECK(code_of([&] { grid_build(pinched, Box::cube(2, 1.0), 0.0625, f1); }) == ErrorCode::transversality_failure);
  CHECK(code_of([&] { grid_build(DefiningFunction::ball(2, 1.3), Box::cube(2, 1.25), 0.125, f1); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("band closures are well formed and exact on affine data") {
  for (int n : {1, 2}) {
    Frame frame = split_frame(AlmostComplexStructure::sheared(n, 0.05), Vec::Zero(2 * n));
    auto grid = ball_grid(frame, n == 1 ? 0.0625 : 0.125);
    for (const BandStencil& st : grid->band_stencils()) {
      CHECK(std::abs(grid->rho()(st.foot)) <= 1e-12);
      CHECK(st.kappa <= 1.0);
      double wsum = 0.0;
      for (int c = 0; c < st.corners; ++c) {
        CHECK(grid->kind(st.corner_index[c]) == PointKind::interior);
        wsum += st.corner_weight[c];
      }
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    }
    PointFunction affine = [](const Vec& x) { return 0.3 + x[0] - 2.0 * x[1]; };
    auto phi = ScalarField::sample(grid, affine);
    auto u = phi;
    for (std::size_t b : grid->band()) u[b] = 1e3;
    apply_band_closure(u, phi);
    for (std::size_t b : grid->band()) CHECK(u[b] == doctest::Approx(affine(grid->point(b))).epsilon(1e-11));
  }
}

TEST_CASE("classification is stable under refinement") {
  Frame frame = standard_frame(1);
  auto coarse = ball_grid(frame, 0.125);
  auto fine = ball_grid(frame, 0.0625);
  for (std::size_t i = 0; i < coarse->size(); ++i) {
    Vec x = coarse->point(i);
    std::size_t j = fine->nearest(x);
    bool a = coarse->kind(i) == PointKind::interior;
    bool b = fine->kind(j) == PointKind::interior;
    if (a != b) CHECK(std::abs(x.norm() - 1.0) <= 0.0625);
  }
}

TEST_CASE("m(rho) for balls and homogeneity") {
  Frame frame = standard_frame(2);
  auto grid = ball_grid(frame, 0.25);
  MAOperator op(grid, frame);
  auto rho = ScalarField::sample(grid, grid->rho().value);
  CHECK(m_rho(op, rho) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m_rho(op, 0.5 * rho) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m_rho(op, 3.0 * rho) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Frame sheared = split_frame(AlmostComplexStructure::sheared(2, 0.05), Vec::Zero(4));
  MAOperator ops(grid, sheared);
  double m = m_rho(ops, rho);
  MESSAGE("m(rho) for sheared(0.05) = " << m);
  CHECK(std::abs(m - 1.0) <= 0.1);
  auto neg = -1.0 * rho;
  CHECK_THROWS_AS(m_rho(op, neg), Error);
}

TEST_CASE("barrier constants") {
  Frame frame = standard_frame(2);
  const double h = 0.25;
  auto grid = ball_grid(frame, h);
  MAOperator op(grid, frame);
  auto rho = ScalarField::sample(grid, grid->rho().value);
  auto zero = ScalarField::sample(grid, [](const Vec&) { return 0.0; });
  auto one = ScalarField::sample(grid, [](const Vec&) { return 1.0; });

  CHECK(barrier_admissible(op, rho, zero, one, 1.0));
  CHECK_FALSE(barrier_admissible(op, rho, zero, one, 0.99));
  auto pair = build_barriers(op, rho, zero, one);
  CHECK(pair.a >= 1.0);
  CHECK(pair.a <= 1.1 * (1.0 + 1e-9));
  for (std::size_t i : grid->interior()) CHECK(pair.lower[i] <= pair.upper[i]);

  auto degenerate = build_barriers(op, rho, zero, zero);
  CHECK(degenerate.a == doctest::Approx(1.1 * h));

  // phi = x1 + 0.4 x1^2: scan a fine ladder of A for the smallest admissible one.
  auto phi = ScalarField::sample(grid, [](const Vec& x) { return x[0] + 0.4 * x[0] * x[0]; });
  double scan = 0.0;
  for (int k = 1; k < 4000; ++k) {
    if (barrier_admissible(op, rho, phi, one, 0.001 * k)) {
      scan = 0.001 * k;
      break;
    }
  }
  REQUIRE(scan > 0.0);
  auto bp = build_barriers(op, rho, phi, one);
  CHECK(bp.a >= scan - 0.001);
  CHECK(bp.a <= 2.0 * scan);
  CHECK(psh_classify(op, bp.lower).margin >= -1e-8);
}
