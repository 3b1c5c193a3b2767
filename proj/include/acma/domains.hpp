#pragma once

#include "acma/field.hpp"
#include "acma/grid.hpp"
#include "acma/ma_operator.hpp"

namespace acma {

/// Classifies the grid over `box` (snapped to spacing h) against rho and builds
/// the band closures. The frame is used to confirm that rho is strictly psh.
/// Throws EmptyDomain, NotStrictlyPsh, TransversalityFailure, or InvalidArgument
/// when a grid point of {rho <= 0} lies on the box face.
GridPtr grid_build(const DefiningFunction& rho, const Box& box, double h, const Frame& frame);

/// Overwrites band values of u from the interior values and the boundary
/// trace of phi (see BandStencil).
void apply_band_closure(ScalarField& u, const ScalarField& phi);

/// max over interior points of 1 / lambda_min(A(rho)). Throws NotStrictlyPsh.
double m_rho(const MAOperator& op, const ScalarField& rho);

struct BarrierPair {
  ScalarField lower;
  ScalarField upper;
  double a = 0.0;
};

/// Smallest A (doubling from the floor h, then bisection, times 1.1) with
///   A * A(rho) + A(phi) >= f^{1/n} I   and   A * A(rho) >= A(phi)
/// at every interior point.
BarrierPair build_barriers(const MAOperator& op, const ScalarField& rho, const ScalarField& phi,
                           const ScalarField& f);

/// True when both barrier conditions hold for the given A.
bool barrier_admissible(const MAOperator& op, const ScalarField& rho, const ScalarField& phi,
                        const ScalarField& f, double a);

}  // namespace acma
