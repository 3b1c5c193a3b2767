#include "acma/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid_ptr() != b.grid_ptr() && !a.grid().same_layout(b.grid())) {
    throw Error(ErrorCode::grid_mismatch, "fields live on different grids");
  }
}

}  // namespace

ScalarField::ScalarField(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw Error(ErrorCode::invalid_argument, "null grid");
  values_.assign(grid_->size(), kNaN);
  for (std::size_t i : grid_->interior()) values_[i] = 0.0;
  for (std::size_t i : grid_->band()) values_[i] = 0.0;
}

ScalarField ScalarField::sample(GridPtr grid, const PointFunction& f) {
  ScalarField out(std::move(grid));
  const GridDomain& g = out.grid();
  for (std::size_t i : g.interior()) out.values_[i] = f(g.point(i));
  for (std::size_t i : g.band()) out.values_[i] = f(g.point(i));
  out.trace_.resize(g.band().size());
  for (std::size_t k = 0; k < g.band_stencils().size(); ++k) out.trace_[k] = f(g.band_stencils()[k].foot);
  return out;
}

double ScalarField::boundary_value(int band_slot) const {
  if (has_trace()) return trace_[static_cast<std::size_t>(band_slot)];
  return values_[grid_->band()[static_cast<std::size_t>(band_slot)]];
}

Eigen::VectorXd ScalarField::interior_values() const {
  const auto& in = grid_->interior();
  Eigen::VectorXd v(static_cast<Eigen::Index>(in.size()));
  for (std::size_t k = 0; k < in.size(); ++k) v[static_cast<Eigen::Index>(k)] = values_[in[k]];
  return v;
}

void ScalarField::set_interior_values(const Eigen::VectorXd& v) {
  const auto& in = grid_->interior();
  if (static_cast<std::size_t>(v.size()) != in.size()) {
    throw Error(ErrorCode::invalid_argument, "interior vector has wrong length");
  }
  for (std::size_t k = 0; k < in.size(); ++k) values_[in[k]] = v[static_cast<Eigen::Index>(k)];
}

Vec ScalarField::gradient(std::size_t idx) const {
  const GridDomain& g = *grid_;
  const int d = g.real_dim();
  const double h = g.h();
  const auto m = g.multi_index(idx);
  auto value_at = [&](int a, int off) -> double {
    int k = m[a] + off;
    if (k < 0 || k >= g.counts()[a]) return kNaN;
    std::size_t j = static_cast<std::size_t>(static_cast<long>(idx) + off * g.stride(a));
    return g.active(j) ? values_[j] : kNaN;
  };
  Vec out(d);
  const double u0 = values_[idx];
  for (int a = 0; a < d; ++a) {
    double up = value_at(a, 1), dn = value_at(a, -1);
    if (std::isfinite(up) && std::isfinite(dn)) {
      out[a] = (up - dn) / (2.0 * h);
      continue;
    }
    if (std::isfinite(up)) {
      double up2 = value_at(a, 2);
      out[a] = std::isfinite(up2) ? (-3.0 * u0 + 4.0 * up - up2) / (2.0 * h) : (up - u0) / h;
    } else if (std::isfinite(dn)) {
      double dn2 = value_at(a, -2);
      out[a] = std::isfinite(dn2) ? (3.0 * u0 - 4.0 * dn + dn2) / (2.0 * h) : (u0 - dn) / h;
    } else {
      out[a] = 0.0;
    }
  }
  return out;
}

Mat ScalarField::hessian(std::size_t idx) const {
  const GridDomain& g = *grid_;
  if (g.kind(idx) != PointKind::interior) {
    throw Error(ErrorCode::stencil_out_of_domain, "hessian requested off the interior");
  }
  const int d = g.real_dim();
  const double h2 = g.h() * g.h();
  const double* u = values_.data();
  const long i = static_cast<long>(idx);
  Mat out(d, d);
  for (int a = 0; a < d; ++a) {
    const long sa = g.stride(a);
    out(a, a) = (u[i + sa] - 2.0 * u[i] + u[i - sa]) / h2;
    for (int b = a + 1; b < d; ++b) {
      const long sb = g.stride(b);
      double v = (u[i + sa + sb] - u[i + sa - sb] - u[i - sa + sb] + u[i - sa - sb]) / (4.0 * h2);
      out(a, b) = v;
      out(b, a) = v;
    }
  }
  return out;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (std::size_t i : grid_->interior()) m = std::max(m, std::abs(values_[i]));
  for (std::size_t i : grid_->band()) m = std::max(m, std::abs(values_[i]));
  return m;
}

double ScalarField::min_interior() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i : grid_->interior()) m = std::min(m, values_[i]);
  return m;
}

double ScalarField::max_interior() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i : grid_->interior()) m = std::max(m, values_[i]);
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  if (has_trace() && other.has_trace()) {
    for (std::size_t k = 0; k < trace_.size(); ++k) trace_[k] += other.trace_[k];
  } else {
    trace_.clear();
  }
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  if (has_trace() && other.has_trace()) {
    for (std::size_t k = 0; k < trace_.size(); ++k) trace_[k] -= other.trace_[k];
  } else {
    trace_.clear();
  }
  return *this;
}

ScalarField& ScalarField::operator*=(double c) {
  for (double& v : values_) v *= c;
  for (double& v : trace_) v *= c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

double max_interior_difference(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t i : a.grid().interior()) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

PointFunction interpolate(const ScalarField& field) {
  // Tensor cubic Lagrange on a 4^d block of active points when available,
  // multilinear on the enclosing cell otherwise; NaN outside the active set.
  return [field](const Vec& x) -> double {
    const GridDomain& g = field.grid();
    const int d = g.real_dim();
    std::array<double, kMaxRealDim> t{};
    std::array<int, kMaxRealDim> cell{};
    for (int a = 0; a < d; ++a) {
      t[a] = (x[a] - g.box().lo[a]) / g.h();
      cell[a] = static_cast<int>(std::floor(t[a]));
      if (cell[a] < 0 || cell[a] > g.counts()[a] - 1) return kNaN;
      if (cell[a] == g.counts()[a] - 1) cell[a] -= 1;
    }
    auto eval = [&](int width, int shift) -> double {
      std::array<std::array<double, 4>, kMaxRealDim> w{};
      GridDomain::Index base{};
      for (int a = 0; a < d; ++a) {
        base[a] = cell[a] - shift;
        if (base[a] < 0 || base[a] + width - 1 >= g.counts()[a]) return kNaN;
        double s = t[a] - base[a];
        for (int m = 0; m < width; ++m) {
          double l = 1.0;
          for (int k = 0; k < width; ++k) {
            if (k != m) l *= (s - k) / static_cast<double>(m - k);
          }
          w[a][m] = l;
        }
      }
      int total = 1;
      for (int a = 0; a < d; ++a) total *= width;
      double sum = 0.0;
      for (int c = 0; c < total; ++c) {
        GridDomain::Index m{};
        double weight = 1.0;
        int rest = c;
        for (int a = 0; a < d; ++a) {
          int k = rest % width;
          rest /= width;
          m[a] = base[a] + k;
          weight *= w[a][k];
        }
        std::size_t j = g.index(m);
        if (!g.active(j)) return kNaN;
        sum += weight * field[j];
      }
      return sum;
    };
    double v = eval(4, 1);
    if (std::isfinite(v)) return v;
    return eval(2, 0);
  };
}

}  // namespace acma
