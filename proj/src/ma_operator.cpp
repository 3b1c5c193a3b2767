#include "acma/ma_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acma {

PointCoefficients point_coefficients(const Frame& frame, const Vec& x) {
  const int n = frame.complex_dim();
  const int d = frame.real_dim();
  FrameJet jet = frame.jet(x);
  PointCoefficients k;
  k.z = jet.zeta;
  std::array<CVec, kMaxComplexDim * kMaxComplexDim> raw;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      CVec v = CVec::Zero(d);
      for (int a = 0; a < d; ++a) v += jet.zeta(a, p) * jet.d_zeta[a].col(q).conjugate();
      v -= project_01(jet.j, bracket_mixed(jet, p, q));
      raw[p * n + q] = v;
    }
  }
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      for (int a = 0; a < d; ++a) {
        k.c[p * n + q][a] = 0.5 * (raw[p * n + q][a] + std::conj(raw[q * n + p][a]));
      }
    }
  }
  return k;
}

HMat assemble_a(const PointCoefficients& k, const Vec& grad, const Mat& hess) {
  const int d = static_cast<int>(k.z.rows());
  const int n = static_cast<int>(k.z.cols());
  HMat a(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      cplx s = 0.0;
      for (int i = 0; i < d; ++i) {
        cplx row = 0.0;
        for (int j = 0; j < d; ++j) row += hess(i, j) * std::conj(k.z(j, q));
        s += k.z(i, p) * row + k.c[p * n + q][i] * grad[i];
      }
      a(p, q) = s;
    }
  }
  HMat sym = 0.5 * (a + a.adjoint());
  for (int p = 0; p < n; ++p) sym(p, p) = sym(p, p).real();
  return sym;
}

HMat a_matrix(const Frame& frame, const PointFunction& u, const Vec& x, double step) {
  const int d = frame.real_dim();
  const double s = step;
  auto at = [&](int a, double da, int b, double db) {
    Vec y = x;
    y[a] += da;
    y[b] += db;
    return u(y);
  };
  const double u0 = u(x);
  Vec grad(d);
  Mat hess(d, d);
  for (int a = 0; a < d; ++a) {
    double p1 = at(a, s, a, 0), m1 = at(a, -s, a, 0), p2 = at(a, 2 * s, a, 0), m2 = at(a, -2 * s, a, 0);
    grad[a] = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * s);
    hess(a, a) = (-p2 + 16.0 * p1 - 30.0 * u0 + 16.0 * m1 - m2) / (12.0 * s * s);
    for (int b = a + 1; b < d; ++b) {
      auto cross = [&](double t) {
        return (at(a, t, b, t) - at(a, t, b, -t) - at(a, -t, b, t) + at(a, -t, b, -t)) / (4.0 * t * t);
      };
      double v = (4.0 * cross(s) - cross(2 * s)) / 3.0;
      hess(a, b) = v;
      hess(b, a) = v;
    }
  }
  return assemble_a(point_coefficients(frame, x), grad, hess);
}

namespace {

void eig2(const HMat& a, double& lo, double& hi) {
  if (a.rows() == 1) {
    lo = hi = a(0, 0).real();
    return;
  }
  const double m = 0.5 * (a(0, 0).real() + a(1, 1).real());
  const double h = 0.5 * (a(0, 0).real() - a(1, 1).real());
  const double r = std::sqrt(h * h + std::norm(a(0, 1)));
  lo = m - r;
  hi = m + r;
}

}  // namespace

double min_eigenvalue(const HMat& a) {
  double lo, hi;
  eig2(a, lo, hi);
  return lo;
}

double max_eigenvalue(const HMat& a) {
  double lo, hi;
  eig2(a, lo, hi);
  return hi;
}

double hermitian_det(const HMat& a) {
  if (a.rows() == 1) return a(0, 0).real();
  return a(0, 0).real() * a(1, 1).real() - std::norm(a(0, 1));
}

HMat hermitian_inverse(const HMat& a) {
  const double det = hermitian_det(a);
  HMat inv(a.rows(), a.cols());
  if (a.rows() == 1) {
    inv(0, 0) = 1.0 / det;
    return inv;
  }
  inv(0, 0) = a(1, 1).real() / det;
  inv(1, 1) = a(0, 0).real() / det;
  inv(0, 1) = -a(0, 1) / det;
  inv(1, 0) = -a(1, 0) / det;
  return inv;
}

MAOperator::MAOperator(GridPtr grid, Frame frame) : grid_(std::move(grid)), frame_(std::move(frame)) {
  if (grid_->complex_dim() != frame_.complex_dim()) {
    throw Error(ErrorCode::invalid_argument, "grid and frame dimensions differ");
  }
  const auto& in = grid_->interior();
  coeffs_.resize(in.size());
  const long count = static_cast<long>(in.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) {
    coeffs_[static_cast<std::size_t>(k)] = point_coefficients(frame_, grid_->point(in[static_cast<std::size_t>(k)]));
  }
}

HMat MAOperator::a_matrix_slot(const ScalarField& u, int slot) const {
  const std::size_t idx = grid_->interior()[static_cast<std::size_t>(slot)];
  const int d = grid_->real_dim();
  const double h = grid_->h();
  const double* v = u.values().data();
  const long i = static_cast<long>(idx);
  Vec grad(d);
  Mat hess(d, d);
  for (int a = 0; a < d; ++a) {
    const long sa = grid_->stride(a);
    grad[a] = (v[i + sa] - v[i - sa]) / (2.0 * h);
    hess(a, a) = (v[i + sa] - 2.0 * v[i] + v[i - sa]) / (h * h);
    for (int b = a + 1; b < d; ++b) {
      const long sb = grid_->stride(b);
      double x = (v[i + sa + sb] - v[i + sa - sb] - v[i - sa + sb] + v[i - sa - sb]) / (4.0 * h * h);
      hess(a, b) = x;
      hess(b, a) = x;
    }
  }
  return assemble_a(coeffs_[static_cast<std::size_t>(slot)], grad, hess);
}

HMat MAOperator::a_matrix(const ScalarField& u, std::size_t idx) const {
  if (u.grid_ptr() != grid_ && !u.grid().same_layout(*grid_)) {
    throw Error(ErrorCode::grid_mismatch, "field and operator grids differ");
  }
  const int slot = grid_->interior_slot(idx);
  if (slot < 0) throw Error(ErrorCode::stencil_out_of_domain, "A(u) needs an interior point");
  return a_matrix_slot(u, slot);
}

void MAOperator::linearization(const HMat& a_inverse, int slot, Mat& second, Vec& first) const {
  const PointCoefficients& k = coeffs_[static_cast<std::size_t>(slot)];
  const int d = grid_->real_dim();
  const int n = grid_->complex_dim();
  second.resize(d, d);
  first.resize(d);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      cplx s = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) s += k.z(a, p) * a_inverse(q, p) * std::conj(k.z(b, q));
      second(a, b) = s.real();
      second(b, a) = s.real();
    }
    cplx m = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) m += a_inverse(q, p) * k.c[p * n + q][a];
    first[a] = m.real();
  }
}

EquationResidual ma_residual(const MAOperator& op, const ScalarField& u, const ScalarField& f) {
  const auto& in = op.grid().interior();
  EquationResidual r;
  r.values.resize(in.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < in.size(); ++k) {
    double v = hermitian_det(op.a_matrix_slot(u, static_cast<int>(k))) - f[in[k]];
    r.values[k] = v;
    sum += v * v;
    if (std::abs(v) > r.max) {
      r.max = std::abs(v);
      r.worst_point = in[k];
    }
  }
  r.l2 = in.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(in.size()));
  return r;
}

const char* to_string(PshVerdict v) {
  switch (v) {
    case PshVerdict::strictly_psh: return "strictly_psh";
    case PshVerdict::psh: return "psh";
    case PshVerdict::not_psh: return "not_psh";
  }
  return "not_psh";
}

PshReport psh_classify(const MAOperator& op, const ScalarField& u, std::span<const std::size_t> region,
                       double tol) {
  PshReport rep;
  rep.tolerance = tol > 0.0 ? tol : 1e-8 * std::max(1.0, u.max_abs());
  rep.margin = std::numeric_limits<double>::infinity();
  auto visit = [&](std::size_t idx) {
    int slot = op.grid().interior_slot(idx);
    if (slot < 0) return;
    double m = min_eigenvalue(op.a_matrix_slot(u, slot));
    if (m < rep.margin) {
      rep.margin = m;
      rep.worst_point = idx;
    }
  };
  if (region.empty()) {
    for (std::size_t idx : op.grid().interior()) visit(idx);
  } else {
    for (std::size_t idx : region) visit(idx);
  }
  if (rep.margin > rep.tolerance) {
    rep.verdict = PshVerdict::strictly_psh;
  } else if (rep.margin >= -rep.tolerance) {
    rep.verdict = PshVerdict::psh;
  } else {
    rep.verdict = PshVerdict::not_psh;
  }
  return rep;
}

double linearized_apply(const MAOperator& op, const ScalarField& u, const ScalarField& w, std::size_t idx) {
  HMat a = op.a_matrix(u, idx);
  if (!(min_eigenvalue(a) > 0.0)) {
    throw Error(ErrorCode::not_positive_definite, "A(u) is not positive definite");
  }
  HMat aw = op.a_matrix(w, idx);
  return (hermitian_inverse(a) * aw).trace().real();
}

double psh_margin(const Frame& frame, const PointFunction& u, std::span<const Vec> points) {
  double m = std::numeric_limits<double>::infinity();
  for (const Vec& x : points) m = std::min(m, min_eigenvalue(a_matrix(frame, u, x)));
  return m;
}

}  // namespace acma
