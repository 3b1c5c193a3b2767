#include "acma/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/QR>

namespace acma {

namespace {

// Active axis-neighbour difference quotients of u over a point set.
double lipschitz_over(const ScalarField& u, bool interior_only) {
  const GridDomain& g = u.grid();
  const int d = g.real_dim();
  double best = 0.0;
  auto usable = [&](std::size_t i) { return interior_only ? g.interior_slot(i) >= 0 : g.active(i); };
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!usable(i)) continue;
    GridDomain::Index m = g.multi_index(i);
    for (int a = 0; a < d; ++a) {
      if (m[a] + 1 >= g.counts()[a]) continue;
      std::size_t j = i + static_cast<std::size_t>(g.stride(a));
      if (!usable(j)) continue;
      best = std::max(best, std::abs(u[j] - u[i]) / g.h());
    }
  }
  return best;
}

double max_active_difference(const ScalarField& a, const ScalarField& b, bool signed_excess) {
  double worst = signed_excess ? -std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t i : a.grid().interior()) {
    double diff = a[i] - b[i];
    worst = std::max(worst, signed_excess ? diff : std::abs(diff));
  }
  return worst;
}

// Quadratic probe Re(w^* H w) + Re(w^T S w) + <l, x>, w = z - c in J_st coordinates.
struct Quadratic {
  HMat hermitian;
  HMat symmetric;
  Vec center;
  Vec linear;

  double operator()(const Vec& x) const {
    const int n = static_cast<int>(hermitian.rows());
    HVec w(n);
    for (int p = 0; p < n; ++p) w[p] = cplx(x[2 * p] - center[2 * p], x[2 * p + 1] - center[2 * p + 1]);
    cplx herm = (w.adjoint() * hermitian * w)(0, 0);
    cplx sym = (w.transpose() * symmetric * w)(0, 0);
    return herm.real() + sym.real() + linear.dot(x);
  }

  Vec gradient(const Vec& x) const {
    Vec g(x.size());
    for (int a = 0; a < x.size(); ++a) {
      Vec e = Vec::Zero(x.size());
      e[a] = 1.0;
      g[a] = ((*this)(x + e) - (*this)(x - e)) / 2.0;  // exact on quadratics
    }
    return g;
  }
};

class ProbeFactory {
 public:
  ProbeFactory(const MAOperator& op, std::uint64_t seed) : op_(op), rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  // Draws until the sampled probe is strictly psh on the grid; counts redraws.
  // The linear part is chosen so that u - q is critical at the grid point `tilt`.
  Quadratic draw(const Vec& center_hint, double spread, const ScalarField& u, std::size_t tilt, int& redraws) {
    const Vec x = u.grid().point(tilt);
    for (int attempt = 0; attempt < 50; ++attempt) {
      Quadratic q = raw(center_hint, spread);
      q.linear = u.gradient(tilt) - q.gradient(x);
      if (strictly_psh(q)) return q;
      ++redraws;
    }
    throw Error(ErrorCode::not_strictly_psh, "no strictly psh quadratic probe found in 50 draws");
  }

 private:
  Quadratic raw(const Vec& center_hint, double spread) {
    const int n = op_.complex_dim();
    std::normal_distribution<double> normal;
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> gauss(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) gauss(r, c) = cplx(normal(rng_), normal(rng_));
    Eigen::HouseholderQR<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>> qr(gauss);
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> unitary = qr.householderQ();
    HMat diag = HMat::Zero(n, n);
    for (int p = 0; p < n; ++p) diag(p, p) = uniform(0.1, 1.0);
    Quadratic q;
    q.hermitian = unitary * diag * unitary.adjoint();
    q.symmetric = HMat::Zero(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c) {
        cplx s = 0.03 * cplx(normal(rng_), normal(rng_));
        q.symmetric(r, c) = s;
        q.symmetric(c, r) = s;
      }
    q.linear = Vec::Zero(center_hint.size());
    q.center = center_hint;
    for (int a = 0; a < q.center.size(); ++a) q.center[a] += uniform(-spread, spread);
    return q;
  }

  bool strictly_psh(const Quadratic& q) const {
    if (op_.frame().structure().family() == StructureFamily::standard) return true;
    ScalarField field = ScalarField::sample(op_.grid_ptr(), [&](const Vec& x) { return q(x); });
    return psh_classify(op_, field, {}, 1e-12).verdict == PshVerdict::strictly_psh;
  }

  const MAOperator& op_;
  std::mt19937_64 rng_;
};

// Interior points of the grid inside the optional region.
std::vector<std::size_t> domain_points(const GridDomain& g, const std::optional<Ball>& region) {
  std::vector<std::size_t> pts;
  for (std::size_t i : g.interior()) {
    if (!region || region->contains(g.point(i))) pts.push_back(i);
  }
  return pts;
}

double domain_radius(const GridDomain& g, const std::vector<std::size_t>& pts) {
  Vec centroid = Vec::Zero(g.real_dim());
  for (std::size_t i : pts) centroid += g.point(i);
  centroid /= static_cast<double>(pts.size());
  double r = 0.0;
  for (std::size_t i : pts) r = std::max(r, (g.point(i) - centroid).norm());
  return r;
}

// Distance from x to the complement of the domain point set: band points and
// the region boundary.
double clearance(const GridDomain& g, const Vec& x, const std::optional<Ball>& region) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t b : g.band()) c = std::min(c, (g.point(b) - x).norm());
  if (region) c = std::min(c, region->radius - (x - region->center).norm());
  return c;
}

}  // namespace

double discrete_lipschitz(const ScalarField& u) { return lipschitz_over(u, false); }

MaximalRun solve_maximal(std::shared_ptr<const MAOperator> op, const ScalarField& phi, const MaximalConfig& config) {
  const auto& schedule = config.schedule;
  if (schedule.size() < 2) throw Error(ErrorCode::schedule_too_short, "at least two values of k are needed");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] <= 0 || (i > 0 && schedule[i] <= schedule[i - 1]))
      throw Error(ErrorCode::invalid_argument, "schedule must be positive and increasing");
  }
  const GridPtr& g = op->grid_ptr();
  const double n = g->complex_dim();
  ScalarField rho = ScalarField::sample(g, g->rho().value);
  ScalarField det_rho(g);
  for (std::size_t slot = 0; slot < g->interior().size(); ++slot) {
    det_rho[g->interior()[slot]] = hermitian_det(op->a_matrix_slot(rho, static_cast<int>(slot)));
  }

  double scale = 1.0;
  for (double v : phi.trace()) scale = std::max(scale, std::abs(v));

  MaximalRun run{{}, phi, phi, 0.0, 10.0 * (config.solver.tol + g->h() * g->h()) * scale, true};
  std::vector<double> changes;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const int k = schedule[s];
    ScalarField f = (1.0 / std::pow(static_cast<double>(k), n)) * det_rho;
    SolverConfig sc = config.solver;
    if (!run.iterates.empty()) sc.initial_guess = run.iterates.back().solution.u;
    MAProblem problem{op, rho, f, phi};
    MaximalIterate it{k, solve_dirichlet(problem, sc)};
    it.lipschitz = discrete_lipschitz(it.solution.u);
    if (!run.iterates.empty()) {
      const ScalarField& prev = run.iterates.back().solution.u;
      it.change = max_active_difference(it.solution.u, prev, false);
      it.monotone_defect = std::max(0.0, max_active_difference(prev, it.solution.u, true));
      run.monotone = run.monotone && it.monotone_defect <= run.tau;
      changes.push_back(it.change);
    }
    run.iterates.push_back(std::move(it));
  }

  // The scheme error is O(1/k): compare the last change with the one
  // predicted from the previous change.
  if (changes.size() >= 2) {
    const std::size_t m = schedule.size();
    double span_last = 1.0 / schedule[m - 2] - 1.0 / schedule[m - 1];
    double span_prev = 1.0 / schedule[m - 3] - 1.0 / schedule[m - 2];
    double predicted = changes[changes.size() - 2] * span_last / span_prev;
    if (changes.back() > 10.0 * predicted + 1e-14) {
      throw Error(ErrorCode::schedule_too_short,
                  "last change " + std::to_string(changes.back()) + " exceeds 10x the predicted tail " +
                      std::to_string(predicted));
    }
  }

  const ScalarField& last = run.iterates.back().solution.u;
  const ScalarField& before = run.iterates[run.iterates.size() - 2].solution.u;
  const double kl = schedule.back();
  const double kp = schedule[schedule.size() - 2];
  run.limit = last;
  run.extrapolated = (kl / (kl - kp)) * last - (kp / (kl - kp)) * before;
  run.extrapolated.trace() = phi.trace();
  run.lipschitz_estimate = run.iterates.back().lipschitz;
  return run;
}

const char* to_string(ProbeVerdict v) { return v == ProbeVerdict::holds ? "holds" : "VIOLATION"; }

ProbeReport maximality_probe(const MAOperator& op, const ScalarField& u, int trials, std::uint64_t seed, double tau,
                             const std::optional<Ball>& region) {
  const GridDomain& g = op.grid();
  ProbeReport rep;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pts = domain_points(g, region);
  if (pts.empty()) return rep;
  const double radius = region ? region->radius : domain_radius(g, pts);
  ProbeFactory factory(op, seed);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);

  for (int t = 0; t < trials; ++t) {
    // Clip ball B compactly inside the domain point set.
    double r = factory.uniform(0.2, 0.6) * radius;
    Vec b;
    std::size_t bi = 0;
    bool found = false;
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
      bi = pts[pick(factory.rng())];
      b = g.point(bi);
      found = clearance(g, b, region) >= r + g.h();
      if (attempt % 40 == 39) r *= 0.8;
    }
    if (!found) continue;
    Quadratic q = factory.draw(b, 0.25 * r, u, bi, rep.skipped);

    double outside = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> inner;
    for (std::size_t i : pts) {
      Vec x = g.point(i);
      if ((x - b).norm() < r) {
        inner.push_back(i);
      } else {
        outside = std::min(outside, u[i] - q(x));
      }
    }
    if (inner.empty() || !std::isfinite(outside)) continue;
    double excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i : inner) excess = std::max(excess, q(g.point(i)) + outside - u[i]);
    ++rep.trials;
    rep.inner_points += static_cast<int>(inner.size());
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > tau) ++rep.violations;
  }
  rep.verdict = rep.violations > 0 ? ProbeVerdict::violation : ProbeVerdict::holds;
  return rep;
}

ProbeReport fj_harmonic_check(const MAOperator& op, const ScalarField& u, const std::vector<Ball>& subregions,
                              int probes, std::uint64_t seed, double tau) {
  const GridDomain& g = op.grid();
  ProbeReport rep;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  ProbeFactory factory(op, seed);
  for (const Ball& region : subregions) {
    std::vector<std::size_t> pts = domain_points(g, region);
    if (pts.empty()) continue;
    // Touching points are drawn from the inner half of U.
    std::vector<std::size_t> core;
    for (std::size_t i : pts) {
      if ((g.point(i) - region.center).norm() <= 0.5 * region.radius) core.push_back(i);
    }
    if (core.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, core.size() - 1);
    for (int t = 0; t < probes; ++t) {
      Quadratic q = factory.draw(region.center, 0.25 * region.radius, u, core[pick(factory.rng())], rep.skipped);
      // Lowest gap on the rim (within 2h of the edge of U or of the grid
      // domain) against the lowest gap deeper inside.
      double rim = std::numeric_limits<double>::infinity();
      double deep = std::numeric_limits<double>::infinity();
      std::size_t contact = pts.front();
      int deep_count = 0;
      for (std::size_t i : pts) {
        Vec x = g.point(i);
        double gap = u[i] - q(x);
        bool near_edge = region.radius - (x - region.center).norm() < 2.0 * g.h();
        if (!near_edge) {
          for (int a = 0; a < g.real_dim() && !near_edge; ++a) {
            for (int sgn : {-2, -1, 1, 2}) {
              GridDomain::Index m = g.multi_index(i);
              m[a] += sgn;
              if (m[a] < 0 || m[a] >= g.counts()[a] || g.interior_slot(g.index(m)) < 0) {
                near_edge = true;
                break;
              }
            }
          }
        }
        if (near_edge) {
          rim = std::min(rim, gap);
        } else {
          ++deep_count;
          if (gap < deep) {
            deep = gap;
            contact = i;
          }
        }
      }
      if (deep_count == 0 || !std::isfinite(rim)) continue;
      ++rep.trials;
      rep.inner_points += deep_count;
      // Interior contact by more than tau, with the probe strictly psh there.
      double excess = rim - deep;
      rep.max_excess = std::max(rep.max_excess, excess);
      if (excess > tau) {
        HMat aq = a_matrix(op.frame(), [&](const Vec& x) { return q(x); }, g.point(contact));
        if (min_eigenvalue(aq) > 0.0) ++rep.violations;
      }
    }
  }
  rep.verdict = rep.violations > 0 ? ProbeVerdict::violation : ProbeVerdict::holds;
  return rep;
}

LocalityReport locality_check(const MAOperator& op, const ScalarField& u, const std::vector<Ball>& cover,
                              int trials, std::uint64_t seed, double tau) {
  LocalityReport rep;
  std::uint64_t s = seed;
  for (const Ball& ball : cover) {
    rep.local.push_back(maximality_probe(op, u, trials, s++, tau, ball).verdict);
    if (rep.local.back() == ProbeVerdict::violation) rep.verdict = ProbeVerdict::violation;
  }
  rep.global = maximality_probe(op, u, trials, s, tau).verdict;
  rep.consistent = rep.global == rep.verdict;
  return rep;
}

std::vector<Ball> default_cover(int dim, int count) {
  std::vector<Ball> cover;
  cover.push_back({Vec::Zero(dim), 0.6});
  for (int i = 1; i < count; ++i) {
    int axis = (i - 1) / 2 % dim;
    double sign = (i - 1) % 2 == 0 ? 1.0 : -1.0;
    Vec c = Vec::Zero(dim);
    c[axis] = 0.5 * sign;
    cover.push_back({c, 0.45});
  }
  return cover;
}

HolderResult holder_experiment(double alpha, const std::vector<double>& hs, const HolderOptions& options) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::invalid_argument, "alpha must lie in (0, 1]");
  const int dim = 2 * options.n;
  AlmostComplexStructure j = options.epsilon == 0.0 ? AlmostComplexStructure::standard(options.n)
                                                    : AlmostComplexStructure::sheared(options.n, options.epsilon);
  Frame frame = split_frame(j, Vec::Zero(dim));
  Vec p = Vec::Zero(dim);
  p[0] = 1.0;
  PointFunction phi = [p, alpha](const Vec& x) { return -std::pow((x - p).norm(), 1.0 + alpha); };

  HolderResult result;
  for (double h : hs) {
    GridPtr g = grid_build(DefiningFunction::ball(dim), Box::cube(dim, 1.25), h, frame);
    auto op = std::make_shared<const MAOperator>(g, frame);
    MaximalRun run = solve_maximal(op, ScalarField::sample(g, phi), options.maximal);
    const double up = phi(p);
    std::vector<std::pair<double, double>> samples;
    for (double t = g->h(); t <= 0.5 + 1e-12; t *= 2.0) {
      Vec x = p;
      x[0] -= t;
      std::size_t idx = g->nearest(x);
      if (g->interior_slot(idx) < 0) continue;
      samples.emplace_back(t, up - run.limit[idx]);
    }
    // Least squares slope of log(gap) against log(t).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (auto [t, gap] : samples) {
      if (!(gap > 0.0)) continue;
      double lx = std::log(t), ly = std::log(gap);
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
      ++m;
    }
    double beta = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : std::numeric_limits<double>::quiet_NaN();
    result.h.push_back(g->h());
    result.beta.push_back(beta);
    result.samples.push_back(std::move(samples));
  }
  return result;
}

}  // namespace acma
