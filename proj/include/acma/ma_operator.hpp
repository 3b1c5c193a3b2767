#pragma once

#include <span>
#include <vector>

#include "acma/field.hpp"
#include "acma/geometry.hpp"

namespace acma {

/// Coefficients of A(u) at one point:
///   A_pq(u) = sum_ab Z_p^a conj(Z_q^b) d_ab u + sum_a c_pq^a d_a u,
/// with c_pq = zeta_p(conj Z_q) - Pi^{0,1}[zeta_p, conj zeta_q], Hermitian-symmetrized.
struct PointCoefficients {
  FrameMat z;
  std::array<std::array<cplx, kMaxRealDim>, kMaxComplexDim * kMaxComplexDim> c{};

  const cplx& first_order(int p, int q, int a, int n) const { return c[p * n + q][a]; }
};

PointCoefficients point_coefficients(const Frame& frame, const Vec& x);

/// A(u) from coordinate gradient and Hessian.
HMat assemble_a(const PointCoefficients& k, const Vec& grad, const Mat& hess);

/// A(u) for a callable u, derivatives by fourth-order central differences.
HMat a_matrix(const Frame& frame, const PointFunction& u, const Vec& x, double step = 1e-3);

/// Smallest eigenvalue, determinant and inverse of a Hermitian matrix of size <= 2.
double min_eigenvalue(const HMat& a);
double max_eigenvalue(const HMat& a);
double hermitian_det(const HMat& a);
HMat hermitian_inverse(const HMat& a);

/// Discrete operator on a grid: frame coefficients cached per interior point.
class MAOperator {
 public:
  MAOperator(GridPtr grid, Frame frame);

  const GridDomain& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Frame& frame() const { return frame_; }
  int complex_dim() const { return grid_->complex_dim(); }

  const PointCoefficients& coefficients(int slot) const { return coeffs_[static_cast<std::size_t>(slot)]; }

  /// A(u) at a grid point (must be interior).
  HMat a_matrix(const ScalarField& u, std::size_t idx) const;
  HMat a_matrix_slot(const ScalarField& u, int slot) const;

  /// Jacobian row of log det A at u: the operator
  ///   L w = sum_ab M_ab d_ab w + sum_a m_a d_a w,   M = Re(Z A^{-T} Z^*)
  /// so that L w = tr(A(u)^{-1} A(w)).
  void linearization(const HMat& a_inverse, int slot, Mat& second, Vec& first) const;

 private:
  GridPtr grid_;
  Frame frame_;
  std::vector<PointCoefficients> coeffs_;
};

struct EquationResidual {
  std::vector<double> values;  // det A - f per interior slot
  double max = 0.0;
  double l2 = 0.0;             // root mean square
  std::size_t worst_point = 0;
};

/// det A(u) - f over interior points.
EquationResidual ma_residual(const MAOperator& op, const ScalarField& u, const ScalarField& f);

enum class PshVerdict { strictly_psh, psh, not_psh };
const char* to_string(PshVerdict v);

struct PshReport {
  double margin = 0.0;
  PshVerdict verdict = PshVerdict::not_psh;
  std::size_t worst_point = 0;
  double tolerance = 0.0;
};

/// Minimum over the region (all interior points when empty) of lambda_min A(u).
/// tol <= 0 selects 1e-8 * max(1, max|u|).
PshReport psh_classify(const MAOperator& op, const ScalarField& u, std::span<const std::size_t> region = {},
                       double tol = -1.0);

/// L w = tr(A(u)^{-1} A(w)) at a grid point. Throws NotPositiveDefinite.
double linearized_apply(const MAOperator& op, const ScalarField& u, const ScalarField& w, std::size_t idx);

/// Smallest eigenvalue of A for a callable on a set of points.
double psh_margin(const Frame& frame, const PointFunction& u, std::span<const Vec> points);

}  // namespace acma
