#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "acma/grid.hpp"

namespace acma {

/// Grid function on the active points of a GridDomain. Band points may also
/// carry a boundary trace: the value at their foot-point on {rho = 0}.
class ScalarField {
 public:
  explicit ScalarField(GridPtr grid);

  /// Samples f at every active point and at every band foot-point.
  static ScalarField sample(GridPtr grid, const PointFunction& f);

  const GridDomain& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  double operator[](std::size_t idx) const { return values_[idx]; }
  double& operator[](std::size_t idx) { return values_[idx]; }
  std::span<const double> values() const { return values_; }

  /// Boundary values at band foot-points, indexed by band slot; empty when
  /// the field carries no trace.
  const std::vector<double>& trace() const { return trace_; }
  std::vector<double>& trace() { return trace_; }
  bool has_trace() const { return !trace_.empty(); }
  /// Trace when present, otherwise the band value itself.
  double boundary_value(int band_slot) const;

  Eigen::VectorXd interior_values() const;
  void set_interior_values(const Eigen::VectorXd& v);

  /// Central first differences; one-sided second order next to inactive points.
  Vec gradient(std::size_t idx) const;
  /// Central second differences (exact on quadratics). Interior points only.
  Mat hessian(std::size_t idx) const;

  double max_abs() const;  // over active points
  double min_interior() const;
  double max_interior() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double c);

 private:
  GridPtr grid_;
  std::vector<double> values_;
  std::vector<double> trace_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);

/// max |a - b| over interior points.
double max_interior_difference(const ScalarField& a, const ScalarField& b);

/// Multilinear interpolant of the active values (exterior neighbours are
/// replaced by the nearest active value along the cell).
PointFunction interpolate(const ScalarField& field);

}  // namespace acma
