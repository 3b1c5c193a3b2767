#pragma once

#include <Eigen/LU>

#include "acma/domains.hpp"
#include "acma/ma_operator.hpp"

namespace acma::testing {

/// For n = 1, det A(u) = A(u) is affine in the interior values once the band
/// closure is applied. Builds that affine map column by column from the grid
/// operator and solves A(u) = f with a dense LU factorization.
inline ScalarField dense_linear_solve(const MAOperator& op, const ScalarField& f, const ScalarField& phi) {
  const GridPtr& g = op.grid_ptr();
  const long count = static_cast<long>(g->interior().size());
  ScalarField zero_data = ScalarField::sample(g, [](const Vec&) { return 0.0; });
  auto evaluate = [&](const Eigen::VectorXd& interior, const ScalarField& data) {
    ScalarField u(g);
    u.set_interior_values(interior);
    apply_band_closure(u, data);
    Eigen::VectorXd out(count);
    for (long k = 0; k < count; ++k) out[k] = op.a_matrix_slot(u, static_cast<int>(k))(0, 0).real();
    return out;
  };
  Eigen::VectorXd offset = evaluate(Eigen::VectorXd::Zero(count), phi);
  Eigen::MatrixXd l(count, count);
  for (long c = 0; c < count; ++c) l.col(c) = evaluate(Eigen::VectorXd::Unit(count, c), zero_data);
  Eigen::VectorXd rhs(count);
  for (long k = 0; k < count; ++k) rhs[k] = f[g->interior()[static_cast<std::size_t>(k)]] - offset[k];
  ScalarField u(g);
  u.set_interior_values(l.partialPivLu().solve(rhs));
  apply_band_closure(u, phi);
  return u;
}

}  // namespace acma::testing
