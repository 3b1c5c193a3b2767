#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "acma/types.hpp"

namespace acma {

/// Vector-valued samples on a regular tensor grid in R^d, evaluated off-grid
/// by tensor-product cubic Lagrange interpolation (stencil clamped at edges).
class RegularTable {
 public:
  RegularTable() = default;
  RegularTable(Vec lo, double h, std::array<int, kMaxRealDim> counts, int components,
               std::vector<double> data);

  /// Builds a table from scattered rows that happen to lie on a regular grid.
  /// Each row is (coordinates..., components...). Throws ParseError when the
  /// rows do not form a complete regular grid.
  static RegularTable from_rows(int dim, int components, const std::vector<std::vector<double>>& rows);

  int dim() const { return static_cast<int>(lo_.size()); }
  int components() const { return components_; }
  const Vec& lo() const { return lo_; }
  double h() const { return h_; }
  const std::array<int, kMaxRealDim>& counts() const { return counts_; }

  Eigen::VectorXd operator()(const Vec& x) const;

 private:
  Vec lo_;
  double h_ = 0.0;
  std::array<int, kMaxRealDim> counts_{};
  int components_ = 0;
  std::vector<double> data_;  // point-major, components contiguous
};

}  // namespace acma
