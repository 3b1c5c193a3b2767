#include <cmath>
#include <random>

#include "acma/domains.hpp"
#include "acma/ma_operator.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace acma;
using acma::testing::ball_grid;

namespace {

const cplx I(0.0, 1.0);

// Standard complex Hessian d^2u / dz_p dzbar_q of a quadratic form x^T Q x / 2,
// written out from the Wirtinger operators.
HMat wirtinger_hessian(const Mat& q, int n) {
  HMat out(n, n);
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r) {
      const int xp = 2 * p, yp = 2 * p + 1, xr = 2 * r, yr = 2 * r + 1;
      out(p, r) = 0.25 * (q(xp, xr) + q(yp, yr)) + 0.25 * I * (q(xp, yr) - q(yp, xr));
    }
  return out;
}

}  // namespace

TEST_CASE("A of |z|^2 and x1 under the standard structure") {
  Frame frame = split_frame(AlmostComplexStructure::standard(2), Vec::Zero(4));
  auto grid = ball_grid(frame, 0.25);
  MAOperator op(grid, frame);
  auto u = ScalarField::sample(grid, acma::testing::normsq());
  auto x1 = ScalarField::sample(grid, [](const Vec& x) { return x[0]; });
  for (std::size_t idx : grid->interior()) {
    CHECK((op.a_matrix(u, idx) - HMat::Identity(2, 2)).norm() <= 1e-12);
    CHECK(op.a_matrix(x1, idx).norm() <= 1e-12);
  }
}

TEST_CASE("quadratic polynomials give the constant Wirtinger Hessian") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  Frame frame = split_frame(AlmostComplexStructure::standard(2), Vec::Zero(4));
  auto grid = ball_grid(frame, 0.25);
  MAOperator op(grid, frame);
  for (int trial = 0; trial < 5; ++trial) {
    Mat q(4, 4);
    Vec b(4);
    for (int i = 0; i < 4; ++i) {
      b[i] = nd(rng);
      for (int j = 0; j <= i; ++j) q(i, j) = q(j, i) = nd(rng);
    }
    auto u = ScalarField::sample(grid, [&](const Vec& x) { return 0.5 * x.dot(q * x) + b.dot(x) + 3.0; });
    HMat expect = wirtinger_hessian(q, 2);
    for (std::size_t idx : grid->interior()) CHECK((op.a_matrix(u, idx) - expect).norm() <= 1e-11);
  }
}

TEST_CASE("A is linear and Hermitian for the sheared structure") {
  Frame frame = split_frame(AlmostComplexStructure::sheared(2, 0.1), Vec::Zero(4));
  auto grid = ball_grid(frame, 0.25);
  MAOperator op(grid, frame);
  auto u = ScalarField::sample(grid, [](const Vec& x) { return std::sin(x[0]) * x[3] + x.squaredNorm(); });
  auto v = ScalarField::sample(grid, [](const Vec& x) { return std::exp(0.5 * x[1]) - x[2] * x[0]; });
  auto w = u + v;
  for (std::size_t idx : grid->interior()) {
    HMat a = op.a_matrix(u, idx);
    CHECK((a - a.adjoint()).norm() == 0.0);
    CHECK((op.a_matrix(w, idx) - a - op.a_matrix(v, idx)).norm() <= 1e-12);
  }
}

TEST_CASE("grid and pointwise A agree to second order") {
  Frame frame = split_frame(AlmostComplexStructure::sheared(2, 0.05), Vec::Zero(4));
  PointFunction fn = [](const Vec& x) { return x.squaredNorm() + 0.1 * std::pow(x[0], 4) + 0.2 * x[1] * x[2]; };
  double prev = 0.0;
  for (double h : {0.25, 0.125}) {
    auto grid = ball_grid(frame, h);
    MAOperator op(grid, frame);
    auto u = ScalarField::sample(grid, fn);
    double err = 0.0;
    for (std::size_t k = 0; k < grid->interior().size(); k += 7) {
      std::size_t idx = grid->interior()[k];
      err = std::max(err, (op.a_matrix(u, idx) - a_matrix(frame, fn, grid->point(idx))).norm());
    }
    if (prev > 0.0) CHECK(prev / err > 3.0);
    prev = err;
  }
}

TEST_CASE("determinant is invariant under a different seed ordering") {
  auto j = AlmostComplexStructure::sheared(2, 0.1);
  Frame f1 = split_frame(j, Vec::Zero(4));
  FrameOptions other;
  other.seed_order = {1, 3, 0, 2};
  Frame f2 = split_frame(j, Vec::Zero(4), other);
  CHECK(f1.seeds() != f2.seeds());
  auto grid = ball_grid(f1, 0.25);
  MAOperator op1(grid, f1), op2(grid, f2);
  auto u = ScalarField::sample(grid, [](const Vec& x) { return x.squaredNorm() + 0.3 * x[0] * x[0] * x[1]; });
  for (std::size_t idx : grid->interior()) {
    HMat a1 = op1.a_matrix(u, idx), a2 = op2.a_matrix(u, idx);
    CHECK(std::abs(hermitian_det(a1) - hermitian_det(a2)) < 1e-8);
    CHECK(std::abs(a1.trace() - a2.trace()) < 1e-8);
  }
}

TEST_CASE("residual of exact solutions") {
  Frame frame = split_frame(AlmostComplexStructure::standard(2), Vec::Zero(4));
  for (double h : {0.25, 0.125}) {
    auto grid = ball_grid(frame, h);
    MAOperator op(grid, frame);
    auto one = ScalarField::sample(grid, [](const Vec&) { return 1.0; });
    auto u = ScalarField::sample(grid, [](const Vec& x) { return x.squaredNorm() - 1.0; });
    CHECK(ma_residual(op, u, one).max <= 1e-12);
    // u = chi(|z|^2) with chi(t) = t^2 / 2: det A = chi'(chi' + t chi'') = 2 t^2.
    auto quartic = ScalarField::sample(grid, [](const Vec& x) { return 0.5 * std::pow(x.squaredNorm(), 2); });
    auto f = ScalarField::sample(grid, [](const Vec& x) { return 2.0 * std::pow(x.squaredNorm(), 2); });
    auto r = ma_residual(op, quartic, f);
    CHECK(r.max <= 3.0 * h * h);
    auto x1 = ScalarField::sample(grid, [](const Vec& x) { return x[0]; });
    auto zero = ScalarField::sample(grid, [](const Vec&) { return 0.0; });
    CHECK(ma_residual(op, x1, zero).max <= 1e-12);
  }
}

TEST_CASE("psh classification and margin homogeneity") {
  Frame frame = split_frame(AlmostComplexStructure::standard(2), Vec::Zero(4));
  auto grid = ball_grid(frame, 0.25);
  MAOperator op(grid, frame);
  auto u = ScalarField::sample(grid, acma::testing::normsq());
  auto rep = psh_classify(op, u);
  CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.verdict == PshVerdict::strictly_psh);
  auto x1 = ScalarField::sample(grid, [](const Vec& x) { return x[0]; });
  auto rx = psh_classify(op, x1);
  CHECK(std::abs(rx.margin) <= 1e-12);
  CHECK(rx.verdict == PshVerdict::psh);
  auto indefinite = ScalarField::sample(grid, [](const Vec& x) {
    return x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3];
  });
  auto ri = psh_classify(op, indefinite);
  CHECK(ri.margin == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ri.verdict == PshVerdict::not_psh);

  Frame sheared = split_frame(AlmostComplexStructure::sheared(2, 0.1), Vec::Zero(4));
  MAOperator ops(grid, sheared);
  auto v = ScalarField::sample(grid, [](const Vec& x) { return x.squaredNorm() + 0.2 * std::sin(x[0] + x[3]); });
  double m = psh_classify(ops, v).margin;
  for (double c : {0.5, 2.0, 7.0}) {
    CHECK(psh_classify(ops, c * v).margin == doctest::Approx(c * m).epsilon(1e-12));
  }
}

TEST_CASE("linearized operator") {
  Frame frame = split_frame(AlmostComplexStructure::standard(2), Vec::Zero(4));
  auto grid = ball_grid(frame, 0.25);
  MAOperator op(grid, frame);
  auto u = ScalarField::sample(grid, acma::testing::normsq());
  auto w1 = ScalarField::sample(grid, [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; });
  auto w2 = ScalarField::sample(grid, [](const Vec& x) { return x[0]; });
  for (std::size_t idx : grid->interior()) {
    CHECK(linearized_apply(op, u, w1, idx) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(linearized_apply(op, u, w2, idx)) <= 1e-12);
  }
  auto bad = ScalarField::sample(grid, [](const Vec& x) { return x[0]; });
  CHECK_THROWS_AS(linearized_apply(op, bad, w1, grid->interior().front()), Error);
}

TEST_CASE("linearization matches the difference quotient of log det A") {
  Frame frame = split_frame(AlmostComplexStructure::sheared(2, 0.1), Vec::Zero(4));
  auto grid = ball_grid(frame, 0.25);
  MAOperator op(grid, frame);
  auto u = ScalarField::sample(grid, [](const Vec& x) {
    return x.squaredNorm() + 0.2 * std::sin(2.0 * x[0]) * x[1] + 0.1 * x[2] * x[3] * x[3];
  });
  auto w = ScalarField::sample(grid, [](const Vec& x) { return std::cos(x[0] - x[2]) + x[1] * x[3]; });
  for (std::size_t k = 0; k < grid->interior().size(); k += 3) {
    std::size_t idx = grid->interior()[k];
    double lw = linearized_apply(op, u, w, idx);
    double base = std::log(hermitian_det(op.a_matrix(u, idx)));
    double prev_err = 0.0;
    for (double t : {1e-3, 5e-4}) {
      double q = (std::log(hermitian_det(op.a_matrix(u + t * w, idx))) - base) / t;
      double err = std::abs(q - lw);
      CHECK(err <= 50.0 * t);
      if (prev_err > 1e-9) CHECK(err < prev_err);
      prev_err = err;
    }
    // The assembled Jacobian row gives the same number.
    Mat second;
    Vec first;
    op.linearization(hermitian_inverse(op.a_matrix(u, idx)), static_cast<int>(k), second, first);
    double row = (second.cwiseProduct(w.hessian(idx))).sum() + first.dot(w.gradient(idx));
    CHECK(row == doctest::Approx(lw).epsilon(1e-10));
  }
}
