#include "acma/disks.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/QR>

namespace acma {

namespace {

const cplx kI(0.0, 1.0);

int pair_index(int j, int k) {
  const int t = j + k;
  return t * (t + 1) / 2 + k;
}

HVec to_complex(const Vec& v) {
  const int n = static_cast<int>(v.size()) / 2;
  HVec c(n);
  for (int k = 0; k < n; ++k) c[k] = cplx(v[2 * k], v[2 * k + 1]);
  return c;
}

Vec to_real(const HVec& c) {
  const int n = static_cast<int>(c.size());
  Vec v(2 * n);
  for (int k = 0; k < n; ++k) {
    v[2 * k] = c[k].real();
    v[2 * k + 1] = c[k].imag();
  }
  return v;
}

struct Jet {
  HVec value, ds, dsbar;
};

// Value and Wirtinger derivatives in s of sum a_jk s^j conj(s)^k.
Jet evaluate(const std::vector<HVec>& a, int degree, int n, cplx s) {
  std::vector<cplx> sp(static_cast<std::size_t>(degree) + 1), cp(static_cast<std::size_t>(degree) + 1);
  sp[0] = cp[0] = 1.0;
  for (int p = 1; p <= degree; ++p) {
    sp[p] = sp[p - 1] * s;
    cp[p] = cp[p - 1] * std::conj(s);
  }
  Jet out{HVec::Zero(n), HVec::Zero(n), HVec::Zero(n)};
  for (int t = 0; t <= degree; ++t) {
    for (int k = 0; k <= t; ++k) {
      const int j = t - k;
      const HVec& c = a[static_cast<std::size_t>(pair_index(j, k))];
      out.value += c * (sp[j] * cp[k]);
      if (j > 0) out.ds += c * (static_cast<double>(j) * sp[j - 1] * cp[k]);
      if (k > 0) out.dsbar += c * (static_cast<double>(k) * sp[j] * cp[k - 1]);
    }
  }
  return out;
}

// Least-squares projection of samples on the polar grid onto the polynomial
// space: DFT in angle, then a per-mode radial fit in powers rho^{|m| + 2i}.
class Projector {
 public:
  Projector(int degree, int radial, int angular) : degree_(degree), angular_(angular) {
    for (int i = 0; i < radial; ++i) {
      rings_.push_back(0.5 * (1.0 - std::cos(std::numbers::pi * (i + 0.5) / radial)));
    }
    for (int m = -degree; m <= degree; ++m) {
      const int nb = (degree - std::abs(m)) / 2 + 1;
      Eigen::MatrixXd v(radial, nb);
      for (int i = 0; i < radial; ++i)
        for (int b = 0; b < nb; ++b) v(i, b) = std::pow(rings_[i], std::abs(m) + 2 * b);
      qr_.emplace_back(v);
    }
  }

  const std::vector<double>& rings() const { return rings_; }
  int angular() const { return angular_; }
  cplx node(int ring, int ray) const {
    return rings_[ring] * std::polar(1.0, 2.0 * std::numbers::pi * ray / angular_);
  }

  // samples[ring * angular + ray] -> coefficients
  std::vector<HVec> project(const std::vector<HVec>& samples, int n) const {
    const int radial = static_cast<int>(rings_.size());
    std::vector<HVec> out(static_cast<std::size_t>(pair_index(0, degree_) + 1), HVec::Zero(n));
    for (int m = -degree_; m <= degree_; ++m) {
      const int nb = (degree_ - std::abs(m)) / 2 + 1;
      for (int comp = 0; comp < n; ++comp) {
        Eigen::VectorXcd modes(radial);
        for (int i = 0; i < radial; ++i) {
          cplx sum = 0.0;
          for (int l = 0; l < angular_; ++l) {
            sum += samples[static_cast<std::size_t>(i * angular_ + l)][comp] *
                   std::polar(1.0, -2.0 * std::numbers::pi * m * l / angular_);
          }
          modes[i] = sum / static_cast<double>(angular_);
        }
        const auto& qr = qr_[static_cast<std::size_t>(m + degree_)];
        Eigen::VectorXd re = qr.solve(modes.real().eval());
        Eigen::VectorXd im = qr.solve(modes.imag().eval());
        for (int b = 0; b < nb; ++b) {
          const int t = std::abs(m) + 2 * b;
          const int j = (t + m) / 2, k = (t - m) / 2;
          out[static_cast<std::size_t>(pair_index(j, k))][comp] = cplx(re[b], im[b]);
        }
      }
    }
    return out;
  }

 private:
  int degree_;
  int angular_;
  std::vector<double> rings_;
  std::vector<Eigen::HouseholderQR<Eigen::MatrixXd>> qr_;
};

}  // namespace

Vec Disk::operator()(cplx z) const { return to_real(evaluate(coeffs_, degree_, n_, z / radius_).value); }

Vec Disk::dx(cplx z) const {
  Jet j = evaluate(coeffs_, degree_, n_, z / radius_);
  return to_real(HVec((j.ds + j.dsbar) / radius_));
}

Vec Disk::dy(cplx z) const {
  Jet j = evaluate(coeffs_, degree_, n_, z / radius_);
  return to_real(HVec(kI * (j.ds - j.dsbar) / radius_));
}

Disk make_disk(const AlmostComplexStructure& j, const Vec& v0, const std::vector<Vec>& jets, double radius,
               double tol, const DiskOptions& options) {
  const int n = j.complex_dim();
  const int d = j.real_dim();
  if (jets.empty()) throw Error(ErrorCode::invalid_argument, "a disk needs at least the first jet");
  if (jets.size() > 2) throw Error(ErrorCode::jet_too_long, "jets of length > 2 are not supported");
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "disk radius must be positive");
  if (v0.size() != d) throw Error(ErrorCode::invalid_argument, "center has wrong dimension");
  for (const Vec& v : jets) {
    if (v.size() != d) throw Error(ErrorCode::invalid_argument, "jet vector has wrong dimension");
  }
  const int degree = options.degree;
  const std::size_t ncoef = static_cast<std::size_t>(pair_index(0, degree) + 1);
  const Mat jst = standard_j(n);
  Projector proj(degree, options.radial, options.angular);

  std::vector<HVec> base(ncoef, HVec::Zero(n));
  base[static_cast<std::size_t>(pair_index(0, 0))] = to_complex(v0);
  base[static_cast<std::size_t>(pair_index(1, 0))] = radius * to_complex(jets[0]);
  if (jets.size() == 2) base[static_cast<std::size_t>(pair_index(2, 0))] = 0.5 * radius * radius * to_complex(jets[1]);

  const int radial = static_cast<int>(proj.rings().size());
  const int angular = proj.angular();
  auto picard = [&](const std::vector<HVec>& a, double* residual) {
    std::vector<HVec> g(static_cast<std::size_t>(radial * angular));
    double worst = 0.0;
    for (int i = 0; i < radial; ++i) {
      for (int l = 0; l < angular; ++l) {
        Jet jet = evaluate(a, degree, n, proj.node(i, l));
        Vec p = to_real(jet.value);
        Vec dy = to_real(HVec(kI * (jet.ds - jet.dsbar) / radius));
        Mat jp = j(p);
        if (!jp.allFinite()) throw Error(ErrorCode::no_contraction, "structure is not finite along the disk");
        if (residual) {
          Vec dx = to_real(HVec((jet.ds + jet.dsbar) / radius));
          worst = std::max(worst, (dx + jp * dy).norm());
        }
        g[static_cast<std::size_t>(i * angular + l)] = to_complex(Vec(radius * (jst - jp) * dy));
      }
    }
    if (residual) *residual = worst;
    std::vector<HVec> b = proj.project(g, n);
    std::vector<HVec> next = base;
    for (int t = 0; t < degree; ++t) {
      for (int k = 0; k <= t; ++k) {
        const int jj = t - k;
        next[static_cast<std::size_t>(pair_index(jj, k + 1))] +=
            b[static_cast<std::size_t>(pair_index(jj, k))] / (2.0 * (k + 1));
      }
    }
    // Holomorphic corrections restoring the prescribed jets at 0.
    const HVec& b00 = b[static_cast<std::size_t>(pair_index(0, 0))];
    next[static_cast<std::size_t>(pair_index(1, 0))] -= 0.5 * b00;
    if (jets.size() == 2) {
      const HVec& b10 = b[static_cast<std::size_t>(pair_index(1, 0))];
      const HVec& b01 = b[static_cast<std::size_t>(pair_index(0, 1))];
      next[static_cast<std::size_t>(pair_index(2, 0))] -= 0.5 * (b10 + 0.5 * b01);
    }
    return next;
  };

  auto distance = [](const std::vector<HVec>& x, const std::vector<HVec>& y) {
    double m = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) m = std::max(m, (x[q] - y[q]).cwiseAbs().maxCoeff());
    return m;
  };

  Disk disk;
  disk.n_ = n;
  disk.radius_ = radius;
  disk.center_ = v0;
  disk.jets_ = jets;
  disk.degree_ = degree;
  std::vector<HVec> a = base;
  double prev = -1.0;
  int slow = 0;
  // Ratios of distances near rounding level carry no information.
  const double floor = 1e-11 * std::max(1.0, v0.norm());
  for (int it = 1; it <= options.max_iterations; ++it) {
    double residual = 0.0;
    std::vector<HVec> next = picard(a, &residual);
    const double dist = distance(next, a);
    if (!std::isfinite(dist) || dist > 1e3) throw Error(ErrorCode::no_contraction, "Picard iterates diverge");
    if (prev > floor && dist > floor) {
      const double ratio = dist / prev;
      disk.contraction_ = std::max(disk.contraction_, ratio);
      slow = ratio > options.contraction_limit ? slow + 1 : 0;
      if (slow >= 3) {
        throw Error(ErrorCode::no_contraction,
                    "Picard distance ratio " + std::to_string(ratio) + " exceeds " +
                        std::to_string(options.contraction_limit));
      }
    }
    prev = dist;
    disk.iterations_ = it;
    if (residual <= tol && dist <= tol * radius) {
      disk.coeffs_ = a;
      disk.residual_ = residual;
      return disk;
    }
    a = std::move(next);
  }
  throw Error(ErrorCode::no_contraction,
              "no convergence in " + std::to_string(options.max_iterations) + " Picard iterations");
}

double disk_laplacian_probe(const PointFunction& u, const Disk& disk) {
  const double delta = 0.5 * disk.radius();
  const int rays = 64;
  const double u0 = u(disk(0.0));
  if (!std::isfinite(u0)) throw Error(ErrorCode::disk_escapes_domain, "disk center outside the field");
  auto circle = [&](double r) {
    double sum = 0.0;
    for (int l = 0; l < rays; ++l) {
      double v = u(disk(std::polar(r, 2.0 * std::numbers::pi * l / rays)));
      if (!std::isfinite(v)) throw Error(ErrorCode::disk_escapes_domain, "disk leaves the field's domain");
      sum += v;
    }
    return 4.0 * (sum / rays - u0) / (r * r);
  };
  return (4.0 * circle(delta) - circle(2.0 * delta)) / 3.0;
}

double disk_laplacian_probe(const ScalarField& u, const Disk& disk) {
  return disk_laplacian_probe(interpolate(u), disk);
}

DiskPshReport psh_check_disks(const PointFunction& u, const Frame& frame, const Vec& point, int samples,
                              double radius, std::uint64_t seed, double tol) {
  const int n = frame.complex_dim();
  FrameMat z = frame(point);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  DiskPshReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    HVec alpha = HVec::Zero(n);
    if (s < n) {
      alpha[s] = 1.0;
    } else {
      for (int p = 0; p < n; ++p) alpha[p] = cplx(gauss(rng), gauss(rng));
      alpha /= alpha.norm();
    }
    CVec zeta = z * alpha;
    Vec v1 = 2.0 * zeta.real();
    Disk disk = make_disk(frame.structure(), point, {v1}, radius, tol);
    rep.max_residual = std::max(rep.max_residual, disk.residual());
    double value = disk_laplacian_probe(u, disk);
    rep.values.push_back(value);
    rep.margin = std::min(rep.margin, value);
  }
  return rep;
}

DiskPshReport psh_check_disks(const ScalarField& u, const Frame& frame, const Vec& point, int samples,
                              double radius, std::uint64_t seed, double tol) {
  return psh_check_disks(interpolate(u), frame, point, samples, radius, seed, tol);
}

void export_disk_csv(const Disk& disk, const std::string& path, int rings, int rays) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << "re_z,im_z";
  for (int k = 0; k < disk.complex_dim(); ++k) out << ",x" << k + 1 << ",y" << k + 1;
  out << '\n' << std::setprecision(17);
  for (int i = 0; i <= rings; ++i) {
    const double r = disk.radius() * i / rings;
    for (int l = 0; l < (i == 0 ? 1 : rays); ++l) {
      cplx z = std::polar(r, 2.0 * std::numbers::pi * l / rays);
      Vec p = disk(z);
      out << z.real() << ',' << z.imag();
      for (int a = 0; a < p.size(); ++a) out << ',' << p[a];
      out << '\n';
    }
  }
}

}  // namespace acma
