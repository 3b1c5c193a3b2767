#include "acma/grid.hpp"

#include <algorithm>
#include <cmath>

namespace acma {

Vec DefiningFunction::gradient(const Vec& x) const {
  const double step = 1e-5;
  Vec g(x.size());
  for (int a = 0; a < x.size(); ++a) {
    Vec p = x, m = x;
    p[a] += step;
    m[a] -= step;
    g[a] = (value(p) - value(m)) / (2.0 * step);
  }
  return g;
}

DefiningFunction DefiningFunction::ball(int dim, double radius) {
  const double r2 = radius * radius;
  return {"ball", [r2, dim](const Vec& x) { return x.head(dim).squaredNorm() - r2; }};
}

DefiningFunction DefiningFunction::ellipsoid(const Vec& semi_axes) {
  for (int a = 0; a < semi_axes.size(); ++a) {
    if (!(semi_axes[a] > 0.0)) throw Error(ErrorCode::invalid_argument, "ellipsoid axes must be positive");
  }
  Vec inv = semi_axes.cwiseInverse();
  return {"ellipsoid", [inv](const Vec& x) { return x.cwiseProduct(inv).squaredNorm() - 1.0; }};
}

DefiningFunction DefiningFunction::custom(std::string name, PointFunction value) {
  return {std::move(name), std::move(value)};
}

DefiningFunction DefiningFunction::from_table(RegularTable table) {
  if (table.components() != 1) throw Error(ErrorCode::parse_error, "rho table must have one value column");
  auto shared = std::make_shared<RegularTable>(std::move(table));
  return {"table", [shared](const Vec& x) { return (*shared)(x)[0]; }};
}

DefiningFunction DefiningFunction::scaled(double c) const {
  PointFunction inner = value;
  return {name, [inner, c](const Vec& x) { return c * inner(x); }};
}

Vec GridDomain::point(std::size_t idx) const {
  Index m = multi_index(idx);
  Vec x(real_dim());
  for (int a = 0; a < real_dim(); ++a) x[a] = box_.lo[a] + h_ * m[a];
  return x;
}

GridDomain::Index GridDomain::multi_index(std::size_t idx) const {
  Index m{};
  for (int a = 0; a < real_dim(); ++a) {
    m[a] = static_cast<int>(idx % static_cast<std::size_t>(counts_[a]));
    idx /= static_cast<std::size_t>(counts_[a]);
  }
  return m;
}

std::size_t GridDomain::index(const Index& m) const {
  std::size_t idx = 0;
  for (int a = real_dim() - 1; a >= 0; --a) idx = idx * counts_[a] + static_cast<std::size_t>(m[a]);
  return idx;
}

std::size_t GridDomain::nearest(const Vec& x) const {
  Index m{};
  for (int a = 0; a < real_dim(); ++a) {
    long k = std::lround((x[a] - box_.lo[a]) / h_);
    m[a] = static_cast<int>(std::clamp<long>(k, 0, counts_[a] - 1));
  }
  return index(m);
}

bool GridDomain::same_layout(const GridDomain& other) const {
  if (n_ != other.n_ || counts_ != other.counts_) return false;
  const double tol = 1e-12 * std::max(1.0, std::abs(h_));
  if (std::abs(h_ - other.h_) > tol) return false;
  return (box_.lo - other.box_.lo).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace acma
