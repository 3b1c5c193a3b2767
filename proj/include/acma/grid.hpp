#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "acma/geometry.hpp"
#include "acma/types.hpp"

namespace acma {

/// Defining function rho of Omega = {rho < 0}, closed form or tabulated.
struct DefiningFunction {
  std::string name;
  PointFunction value;

  double operator()(const Vec& x) const { return value(x); }
  Vec gradient(const Vec& x) const;

  static DefiningFunction ball(int dim, double radius = 1.0);
  /// sum (x_a / a_a)^2 - 1
  static DefiningFunction ellipsoid(const Vec& semi_axes);
  static DefiningFunction custom(std::string name, PointFunction value);
  static DefiningFunction from_table(RegularTable table);
  DefiningFunction scaled(double c) const;
};

enum class PointKind : std::uint8_t { exterior, interior, band };

/// Dirichlet closure for one band point: the value there is extrapolated
/// linearly along the normal through the boundary foot-point,
///   u_b = (1 + kappa) * phi(foot) - kappa * sum_c w_c u_c,
/// where the sum is the multilinear interpolant of interior values at
/// foot - sample_depth * normal.
struct BandStencil {
  std::size_t point = 0;
  Vec foot;
  Vec normal;
  double depth = 0.0;
  double sample_depth = 0.0;
  double kappa = 0.0;
  int corners = 0;
  std::array<std::size_t, 16> corner_index{};
  std::array<double, 16> corner_weight{};
};

/// Uniform grid over a box with points classified against rho. Every interior
/// point has its full second-order stencil (axis and pairwise-diagonal
/// neighbours) among interior and band points. Immutable once built.
class GridDomain {
 public:
  using Index = std::array<int, kMaxRealDim>;

  int complex_dim() const { return n_; }
  int real_dim() const { return 2 * n_; }
  const Box& box() const { return box_; }
  double h() const { return h_; }
  const Index& counts() const { return counts_; }
  std::size_t size() const { return size_; }
  long stride(int axis) const { return strides_[axis]; }
  const DefiningFunction& rho() const { return rho_; }

  Vec point(std::size_t idx) const;
  Index multi_index(std::size_t idx) const;
  std::size_t index(const Index& m) const;
  /// Nearest grid index to x (clamped to the box).
  std::size_t nearest(const Vec& x) const;

  PointKind kind(std::size_t idx) const { return kinds_[idx]; }
  bool active(std::size_t idx) const { return kinds_[idx] != PointKind::exterior; }
  const std::vector<std::size_t>& interior() const { return interior_; }
  const std::vector<std::size_t>& band() const { return band_; }
  /// Position in interior() or -1.
  int interior_slot(std::size_t idx) const { return slots_[idx] >= 0 ? slots_[idx] : -1; }
  /// Position in band() or -1.
  int band_slot(std::size_t idx) const { return slots_[idx] <= -2 ? -2 - slots_[idx] : -1; }
  const std::vector<BandStencil>& band_stencils() const { return stencils_; }

  /// Grid metadata equality (dimension, box, spacing).
  bool same_layout(const GridDomain& other) const;

 private:
  friend class GridBuilder;
  int n_ = 1;
  Box box_;
  double h_ = 0.0;
  Index counts_{};
  std::array<long, kMaxRealDim> strides_{};
  std::size_t size_ = 0;
  DefiningFunction rho_;
  std::vector<PointKind> kinds_;
  std::vector<int> slots_;  // >= 0 interior slot, <= -2 encodes band slot, -1 exterior
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> band_;
  std::vector<BandStencil> stencils_;
  bool touches_box_ = false;
};

using GridPtr = std::shared_ptr<const GridDomain>;

}  // namespace acma
