#pragma once

#include <functional>
#include <random>
#include <vector>

#include "acma/domains.hpp"
#include "acma/types.hpp"

namespace acma::testing {

inline std::vector<Vec> random_points(int dim, int count, double half_width, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) {
    Vec p(dim);
    for (int a = 0; a < dim; ++a) p[a] = u(rng);
    out.push_back(p);
  }
  return out;
}

inline PointFunction normsq() {
  return [](const Vec& x) { return x.squaredNorm(); };
}

/// Ball of radius 1 in C^n on the box [-1.25, 1.25]^{2n}.
inline GridPtr ball_grid(const Frame& frame, double h) {
  const int d = frame.real_dim();
  return grid_build(DefiningFunction::ball(d), Box::cube(d, 1.25), h, frame);
}

/// Code of the acma::Error thrown by fn; io_error when nothing is thrown.
inline ErrorCode error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io_error;
}

inline Frame frame_of(const AlmostComplexStructure& j) { return split_frame(j, Vec::Zero(j.real_dim())); }

}  // namespace acma::testing
