#include "acma/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acma {

namespace {

constexpr double kMinGradient = 1e-6;

Vec project_to_boundary(const DefiningFunction& rho, Vec x) {
  for (int it = 0; it < 60; ++it) {
    double v = rho(x);
    Vec g = rho.gradient(x);
    double g2 = g.squaredNorm();
    if (g2 < kMinGradient * kMinGradient) {
      throw Error(ErrorCode::transversality_failure, "|grad rho| below 1e-6 near the boundary");
    }
    Vec step = (v / g2) * g;
    x -= step;
    if (step.norm() < 1e-15 * std::max(1.0, x.norm())) break;
  }
  return x;
}

}  // namespace

class GridBuilder {
 public:
  static GridPtr build(const DefiningFunction& rho, const Box& box, double h, const Frame& frame);

 private:
  static void classify(GridDomain& g);
  static void check_psh(const GridDomain& g, const Frame& frame);
  static void close_band(GridDomain& g);
};

void GridBuilder::classify(GridDomain& g) {
  const int d = g.real_dim();
  std::vector<double> values(g.size_);
  g.kinds_.assign(g.size_, PointKind::exterior);
  bool touches = false;
  for (std::size_t i = 0; i < g.size_; ++i) {
    values[i] = g.rho_(g.point(i));
    if (!std::isfinite(values[i])) throw Error(ErrorCode::invalid_argument, "rho is not finite on the box");
    if (values[i] < 0.0) g.kinds_[i] = PointKind::interior;
    if (values[i] <= 0.0) {
      auto m = g.multi_index(i);
      for (int a = 0; a < d; ++a) {
        if (m[a] < 1 || m[a] > g.counts_[a] - 2) touches = true;
      }
    }
  }
  for (std::size_t i = 0; i < g.size_; ++i) {
    if (g.kinds_[i] == PointKind::interior) g.interior_.push_back(i);
  }
  if (g.interior_.empty()) throw Error(ErrorCode::empty_domain, "rho >= 0 at every grid point");
  g.touches_box_ = touches;
}

void GridBuilder::check_psh(const GridDomain& g, const Frame& frame) {
  // Every other index per axis; a sign change of lambda_min between samples
  // would need curvature on the scale of 2h.
  std::vector<Vec> pts;
  for (std::size_t i : g.interior_) {
    auto m = g.multi_index(i);
    bool keep = true;
    for (int a = 0; a < g.real_dim(); ++a) keep = keep && (m[a] % 2 == 0);
    if (keep) pts.push_back(g.point(i));
  }
  if (pts.empty()) pts.push_back(g.point(g.interior_.front()));
  double margin = std::numeric_limits<double>::infinity();
  const long count = static_cast<long>(pts.size());
#pragma omp parallel for reduction(min : margin)
  for (long k = 0; k < count; ++k) {
    margin = std::min(margin, min_eigenvalue(a_matrix(frame, g.rho_.value, pts[static_cast<std::size_t>(k)])));
  }
  if (!(margin > 0.0)) {
    throw Error(ErrorCode::not_strictly_psh,
                "lambda_min A(rho) = " + std::to_string(margin) + " on the domain");
  }
}

void GridBuilder::close_band(GridDomain& g) {
  const int d = g.real_dim();
  // Band: exterior stencil neighbours (axis and pairwise diagonal) of interior points.
  std::vector<long> offsets;
  for (int a = 0; a < d; ++a) {
    offsets.push_back(g.strides_[a]);
    offsets.push_back(-g.strides_[a]);
    for (int b = a + 1; b < d; ++b) {
      for (int sa : {-1, 1})
        for (int sb : {-1, 1}) offsets.push_back(sa * g.strides_[a] + sb * g.strides_[b]);
    }
  }
  for (std::size_t i : g.interior_) {
    for (long off : offsets) {
      std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + off);
      if (g.kinds_[j] == PointKind::exterior) g.kinds_[j] = PointKind::band;
    }
  }
  for (std::size_t i = 0; i < g.size_; ++i) {
    if (g.kinds_[i] == PointKind::band) g.band_.push_back(i);
  }
  g.slots_.assign(g.size_, -1);
  for (std::size_t k = 0; k < g.interior_.size(); ++k) g.slots_[g.interior_[k]] = static_cast<int>(k);
  for (std::size_t k = 0; k < g.band_.size(); ++k) g.slots_[g.band_[k]] = -2 - static_cast<int>(k);

  const double h = g.h_;
  g.stencils_.resize(g.band_.size());
  const long nb = static_cast<long>(g.band_.size());
  bool transversal = true;
  bool closed = true;
#pragma omp parallel for schedule(dynamic, 64)
  for (long k = 0; k < nb; ++k) {
    BandStencil& st = g.stencils_[static_cast<std::size_t>(k)];
    st.point = g.band_[static_cast<std::size_t>(k)];
    Vec x = g.point(st.point);
    try {
      st.foot = project_to_boundary(g.rho_, x);
    } catch (const Error&) {
      transversal = false;
      continue;
    }
    Vec grad = g.rho_.gradient(st.foot);
    if (grad.norm() < kMinGradient || g.rho_.gradient(x).norm() < kMinGradient) {
      transversal = false;
      continue;
    }
    st.normal = grad / grad.norm();
    st.depth = (x - st.foot).norm();
    bool found = false;
    for (int step = 0; step <= 40 && !found; ++step) {
      const double s = h * (1.0 + 0.25 * step);
      if (s < st.depth) continue;
      Vec q = st.foot - s * st.normal;
      GridDomain::Index base{};
      std::array<double, kMaxRealDim> frac{};
      bool inside = true;
      for (int a = 0; a < d; ++a) {
        double t = (q[a] - g.box_.lo[a]) / h;
        base[a] = static_cast<int>(std::floor(t));
        frac[a] = t - base[a];
        if (base[a] < 0 || base[a] + 1 >= g.counts_[a]) inside = false;
      }
      if (!inside) continue;
      const int corners = 1 << d;
      bool all_interior = true;
      for (int c = 0; c < corners && all_interior; ++c) {
        GridDomain::Index m = base;
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
          int bit = (c >> a) & 1;
          m[a] += bit;
          w *= bit ? frac[a] : 1.0 - frac[a];
        }
        std::size_t j = g.index(m);
        if (g.kinds_[j] != PointKind::interior) all_interior = false;
        st.corner_index[static_cast<std::size_t>(c)] = j;
        st.corner_weight[static_cast<std::size_t>(c)] = w;
      }
      if (!all_interior) continue;
      st.corners = corners;
      st.sample_depth = s;
      st.kappa = st.depth / s;
      found = true;
    }
    if (!found) closed = false;
  }
  if (!transversal) throw Error(ErrorCode::transversality_failure, "|grad rho| below 1e-6 near the boundary");
  if (!closed) {
    throw Error(ErrorCode::stencil_out_of_domain, "no interior cell found along the normal of a band point");
  }
}

GridPtr GridBuilder::build(const DefiningFunction& rho, const Box& box, double h, const Frame& frame) {
  const int d = frame.real_dim();
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "grid spacing must be positive");
  if (box.dim() != d) throw Error(ErrorCode::invalid_argument, "box dimension differs from the structure");
  auto g = std::make_shared<GridDomain>();
  g->n_ = frame.complex_dim();
  g->h_ = h;
  g->rho_ = rho;
  g->box_.lo = box.lo;
  g->box_.hi = box.lo;
  g->size_ = 1;
  for (int a = 0; a < d; ++a) {
    long c = std::lround((box.hi[a] - box.lo[a]) / h) + 1;
    if (c < 4) throw Error(ErrorCode::invalid_argument, "box is too small for the grid spacing");
    g->counts_[a] = static_cast<int>(c);
    g->box_.hi[a] = box.lo[a] + h * static_cast<double>(c - 1);
    g->strides_[a] = static_cast<long>(g->size_);
    g->size_ *= static_cast<std::size_t>(c);
  }
  classify(*g);
  check_psh(*g, frame);
  if (g->touches_box_) {
    throw Error(ErrorCode::invalid_argument, "box must contain {rho <= 0} with a margin of one grid step");
  }
  close_band(*g);
  return g;
}

GridPtr grid_build(const DefiningFunction& rho, const Box& box, double h, const Frame& frame) {
  return GridBuilder::build(rho, box, h, frame);
}

void apply_band_closure(ScalarField& u, const ScalarField& phi) {
  const GridDomain& g = u.grid();
  if (!phi.has_trace()) throw Error(ErrorCode::invalid_argument, "boundary data carries no trace");
  const auto& stencils = g.band_stencils();
  for (std::size_t k = 0; k < stencils.size(); ++k) {
    const BandStencil& st = stencils[k];
    double inner = 0.0;
    for (int c = 0; c < st.corners; ++c) inner += st.corner_weight[c] * u[st.corner_index[c]];
    u[st.point] = (1.0 + st.kappa) * phi.trace()[k] - st.kappa * inner;
  }
  u.trace() = phi.trace();
}

double m_rho(const MAOperator& op, const ScalarField& rho) {
  double worst = std::numeric_limits<double>::infinity();
  const int count = static_cast<int>(op.grid().interior().size());
  for (int k = 0; k < count; ++k) worst = std::min(worst, min_eigenvalue(op.a_matrix_slot(rho, k)));
  if (!(worst > 0.0)) throw Error(ErrorCode::not_strictly_psh, "lambda_min A(rho) <= 0");
  return 1.0 / worst;
}

namespace {

struct BarrierData {
  std::vector<HMat> a_rho;
  std::vector<HMat> a_phi;
  std::vector<double> f_root;
};

BarrierData barrier_data(const MAOperator& op, const ScalarField& rho, const ScalarField& phi,
                         const ScalarField& f) {
  const auto& in = op.grid().interior();
  const double n = op.complex_dim();
  BarrierData data;
  data.a_rho.resize(in.size());
  data.a_phi.resize(in.size());
  data.f_root.resize(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    data.a_rho[k] = op.a_matrix_slot(rho, static_cast<int>(k));
    data.a_phi[k] = op.a_matrix_slot(phi, static_cast<int>(k));
    data.f_root[k] = std::pow(std::max(f[in[k]], 0.0), 1.0 / n);
  }
  return data;
}

bool admissible(const BarrierData& data, double a) {
  const double tol = 1e-12;
  for (std::size_t k = 0; k < data.a_rho.size(); ++k) {
    HMat lower = a * data.a_rho[k] + data.a_phi[k];
    if (min_eigenvalue(lower) - data.f_root[k] < -tol) return false;
    if (min_eigenvalue(a * data.a_rho[k] - data.a_phi[k]) < -tol) return false;
  }
  return true;
}

}  // namespace

bool barrier_admissible(const MAOperator& op, const ScalarField& rho, const ScalarField& phi,
                        const ScalarField& f, double a) {
  return admissible(barrier_data(op, rho, phi, f), a);
}

BarrierPair build_barriers(const MAOperator& op, const ScalarField& rho, const ScalarField& phi,
                           const ScalarField& f) {
  (void)m_rho(op, rho);
  BarrierData data = barrier_data(op, rho, phi, f);
  const double floor = op.grid().h();
  double hi = floor;
  int doublings = 0;
  while (!admissible(data, hi)) {
    hi *= 2.0;
    if (++doublings > 80) throw Error(ErrorCode::not_strictly_psh, "no admissible barrier constant");
  }
  double lo = hi / 2.0;
  if (doublings > 0) {
    for (int it = 0; it < 50 && hi - lo > 1e-12 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      (admissible(data, mid) ? hi : lo) = mid;
    }
  }
  const double a = 1.1 * hi;
  BarrierPair out{phi + a * rho, phi - a * rho, a};
  return out;
}

}  // namespace acma
