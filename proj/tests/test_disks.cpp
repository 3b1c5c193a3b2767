#include <cmath>

#include "acma/disks.hpp"
#include "acma/ma_operator.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace acma;
using acma::testing::error_code;
using acma::testing::frame_of;

namespace {

Vec point4(double a, double b, double c, double d) {
  Vec p(4);
  p << a, b, c, d;
  return p;
}

// Residual of the disk equation d_x lambda + J(lambda) d_y lambda on a polar grid.
double disk_equation_residual(const AlmostComplexStructure& j, const Disk& disk) {
  double worst = 0.0;
  for (int ring = 1; ring <= 6; ++ring)
    for (int ray = 0; ray < 24; ++ray) {
      cplx z = std::polar(disk.radius() * ring / 6.0, 2.0 * M_PI * ray / 24.0);
      worst = std::max(worst, (disk.dx(z) + j(disk(z)) * disk.dy(z)).norm());
    }
  return worst;
}

}  // namespace

TEST_CASE("standard structure gives the affine disk") {
  auto j = AlmostComplexStructure::standard(2);
  Vec v0 = point4(0.1, -0.2, 0.3, 0.0);
  Vec e = point4(1.0, 0.0, 0.5, -0.5);
  Disk disk = make_disk(j, v0, {e}, 0.3, 1e-12);
  CHECK(disk.residual() <= 1e-12);
  CHECK(disk_equation_residual(j, disk) <= 1e-12);
  // lambda(z) = v0 + Re(z) e + Im(z) J_st e
  Mat jst = standard_j(2);
  for (cplx z : {cplx(0.1, 0.0), cplx(0.05, -0.2), cplx(-0.21, 0.1)}) {
    Vec expect = v0 + z.real() * e + z.imag() * (jst * e);
    CHECK((disk(z) - expect).norm() <= 1e-12);
  }
}

TEST_CASE("sheared disks converge quickly at small radius") {
  auto j = AlmostComplexStructure::sheared(2, 0.05);
  Frame frame = frame_of(j);
  Vec p = point4(0.2, -0.1, 0.3, 0.05);
  for (int dir = 0; dir < 2; ++dir) {
    Vec v1 = 2.0 * frame(p).col(dir).real();
    Disk disk = make_disk(j, p, {v1}, 0.2, 1e-10);
    CHECK(disk.residual() <= 1e-8);
    CHECK(disk.iterations() <= 30);
    CHECK(disk_equation_residual(j, disk) <= 1e-7);
  }
}

TEST_CASE("strong shear breaks the contraction") {
  // Radius 1 disk through (0.5, 0, 0, 0) in the second frame direction: the
  // measured Picard distance ratio is about 2.5.
  auto j = AlmostComplexStructure::sheared(2, 10.0);
  Frame frame = frame_of(j);
  Vec p = point4(0.5, 0.0, 0.0, 0.0);
  Vec v1 = 2.0 * frame(p).col(1).real();
  CHECK(error_code([&] { make_disk(j, p, {v1}, 1.0, 1e-8); }) == ErrorCode::no_contraction);
}

TEST_CASE("jet validation") {
  auto j = AlmostComplexStructure::standard(2);
  Vec v = point4(1, 0, 0, 0);
  CHECK(error_code([&] { make_disk(j, Vec::Zero(4), {v, v, v}, 0.2, 1e-10); }) == ErrorCode::jet_too_long);
  CHECK(error_code([&] { make_disk(j, Vec::Zero(4), {}, 0.2, 1e-10); }) == ErrorCode::invalid_argument);
}

TEST_CASE("jets are met") {
  auto j = AlmostComplexStructure::sheared(2, 0.1);
  Frame frame = frame_of(j);
  Vec p = point4(-0.3, 0.1, 0.2, 0.2);
  Vec v1 = 2.0 * frame(p).col(0).real();
  Disk disk = make_disk(j, p, {v1}, 0.2, 1e-10);
  CHECK((disk(0.0) - p).norm() == 0.0);
  CHECK((disk.dx(0.0) - v1).norm() <= 1e-9);

  // Second jet: d_x^2 lambda(0) from a centred difference along the real axis.
  Vec v2 = point4(0.05, -0.02, 0.03, 0.0);
  Disk two = make_disk(j, p, {v1, v2}, 0.2, 1e-10);
  CHECK((two(0.0) - p).norm() == 0.0);
  CHECK((two.dx(0.0) - v1).norm() <= 1e-9);
  const double s = 1e-3;
  Vec second = (two.dx(cplx(s, 0)) - two.dx(cplx(-s, 0))) / (2.0 * s);
  CHECK((second - v2).norm() <= 1e-5);
}

TEST_CASE("contraction grows with the shear") {
  Vec p = point4(0.2, -0.1, 0.3, 0.05);
  double previous = -1.0;
  for (double eps : {0.0125, 0.025, 0.05, 0.1}) {
    auto j = AlmostComplexStructure::sheared(2, eps);
    Frame frame = frame_of(j);
    Disk disk = make_disk(j, p, {2.0 * frame(p).col(1).real()}, 0.2, 1e-12);
    CHECK(disk.contraction() > previous);
    CHECK(disk.contraction() <= 0.1 * eps);  // measured factor is about 0.04 eps
    previous = disk.contraction();
  }
}

TEST_CASE("laplacian probe on standard disks") {
  auto j = AlmostComplexStructure::standard(2);
  Disk disk = make_disk(j, Vec::Zero(4), {point4(1, 0, 0, 0)}, 0.3, 1e-12);
  PointFunction sq = acma::testing::normsq();
  CHECK(disk_laplacian_probe(sq, disk) == doctest::Approx(4.0).epsilon(1e-10));
  PointFunction x1 = [](const Vec& x) { return x[0]; };
  for (const Vec& e : acma::testing::random_points(4, 5, 1.0, 3)) {
    Disk d = make_disk(j, Vec::Zero(4), {e}, 0.2, 1e-12);
    CHECK(std::abs(disk_laplacian_probe(x1, d)) <= 1e-10);
  }
}

TEST_CASE("probe matches 4 A(u)(zeta, conj zeta) on sheared disks") {
  auto j = AlmostComplexStructure::sheared(2, 0.05);
  Frame frame = frame_of(j);
  PointFunction sq = acma::testing::normsq();
  for (const Vec& p : acma::testing::random_points(4, 6, 0.4, 11)) {
    HMat a = a_matrix(frame, sq, p);
    Disk disk = make_disk(j, p, {2.0 * frame(p).col(0).real()}, 0.2, 1e-12);
    CHECK(std::abs(disk_laplacian_probe(sq, disk) - 4.0 * a(0, 0).real()) <= 1e-4);
  }
}

TEST_CASE("psh_check_disks examples") {
  auto j = AlmostComplexStructure::standard(2);
  Frame frame = frame_of(j);
  Vec p = point4(0.1, 0.2, -0.1, 0.0);
  auto sq = psh_check_disks(acma::testing::normsq(), frame, p, 8, 0.2, 5);
  CHECK(sq.margin == doctest::Approx(4.0).epsilon(1e-9));
  for (double v : sq.values) CHECK(v == doctest::Approx(4.0).epsilon(1e-9));

  PointFunction split = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3]; };
  auto sp = psh_check_disks(split, frame, p, 32, 0.2, 5);
  CHECK(sp.margin == doctest::Approx(-4.0).epsilon(1e-9));

  PointFunction x1 = [](const Vec& x) { return x[0]; };
  CHECK(std::abs(psh_check_disks(x1, frame, p, 16, 0.2, 5).margin) <= 1e-10);
}

TEST_CASE("psh_check_disks sign agrees with psh_classify") {
  auto j = AlmostComplexStructure::sheared(2, 0.05);
  Frame frame = frame_of(j);
  auto grid = acma::testing::ball_grid(frame, 0.125);
  MAOperator op(grid, frame);
  PointFunction fields[] = {
      acma::testing::normsq(),
      [](const Vec& x) { return x[0] * x[0] + x[1] * x[1] - 0.5 * (x[2] * x[2] + x[3] * x[3]); },
  };
  for (const auto& u : fields) {
    ScalarField f = ScalarField::sample(grid, u);
    PshReport classified = psh_classify(op, f);
    Vec p = point4(0.125, 0.0, -0.125, 0.25);
    double margin = psh_check_disks(u, frame, p, 16, 0.2, 9).margin;
    CHECK((margin > 0.0) == (classified.verdict != PshVerdict::not_psh));
  }
}

TEST_CASE("disks depend smoothly on the centre") {
  auto j = AlmostComplexStructure::sheared(2, 0.1);
  Frame frame = frame_of(j);
  Vec base = point4(0.1, 0.0, 0.2, -0.1);
  Vec v1 = 2.0 * frame(base).col(1).real();
  Vec dir = point4(1.0, 0.0, 0.0, 0.0);
  const cplx z(0.07, 0.11);
  auto derivative = [&](double s) {
    Disk plus = make_disk(j, base + s * dir, {v1}, 0.2, 1e-13);
    Disk minus = make_disk(j, base - s * dir, {v1}, 0.2, 1e-13);
    return Vec((plus(z) - minus(z)) / (2.0 * s));
  };
  Vec d1 = derivative(1e-2), d2 = derivative(5e-3), d3 = derivative(2.5e-3);
  CHECK(d1.norm() <= 10.0);
  double e12 = (d1 - d2).norm(), e23 = (d2 - d3).norm();
  CHECK(e23 <= std::max(e12, 1e-9));
  CHECK(e23 <= 1e-4);
}

TEST_CASE("oracle agreement over random points and directions") {
  // Smooth fields, grid A(u) at h = 1/8 against the disk probe of the grid
  // interpolant; tolerance 10 (h^2 + tol) scale.
  const double h = 0.125, tol = 1e-10;
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  for (double eps : {0.0, 0.05, 0.1}) {
    auto j = AlmostComplexStructure::sheared(2, eps);
    Frame frame = frame_of(j);
    auto grid = acma::testing::ball_grid(frame, h);
    MAOperator op(grid, frame);
    PointFunction u = [](const Vec& x) { return x.squaredNorm() + 0.3 * std::sin(x[0]) * x[3] + 0.2 * x[1] * x[2]; };
    ScalarField field = ScalarField::sample(grid, u);
    double scale = std::max(1.0, field.max_abs());
    const auto& interior = grid->interior();
    int pairs = 0;
    double worst = 0.0;
    while (pairs < 34) {
      std::size_t idx = interior[std::uniform_int_distribution<std::size_t>(0, interior.size() - 1)(rng)];
      Vec p = grid->point(idx);
      if (p.norm() > 0.6) continue;
      HVec alpha(2);
      alpha << cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng));
      alpha /= alpha.norm();
      HMat a = op.a_matrix(field, idx);
      double expect = 4.0 * (alpha.transpose() * a * alpha.conjugate())(0, 0).real();
      Disk disk = make_disk(j, p, {2.0 * (frame(p) * alpha).real()}, 0.2, tol);
      CHECK(disk.residual() <= 1e-8);
      worst = std::max(worst, std::abs(disk_laplacian_probe(field, disk) - expect));
      ++pairs;
    }
    CHECK(worst <= 10.0 * (h * h + tol) * scale);
  }
}

TEST_CASE("disks leaving a grid field are reported") {
  auto j = AlmostComplexStructure::standard(2);
  Frame frame = frame_of(j);
  auto grid = acma::testing::ball_grid(frame, 0.25);
  ScalarField field = ScalarField::sample(grid, acma::testing::normsq());
  Disk disk = make_disk(j, point4(1.0, 0.0, 0.0, 0.0), {point4(0, 0, 1, 0)}, 0.5, 1e-12);
  CHECK(error_code([&] { disk_laplacian_probe(field, disk); }) == ErrorCode::disk_escapes_domain);
}
