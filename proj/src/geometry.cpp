#include "acma/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include <Eigen/LU>

namespace acma {

namespace {

constexpr double kPivotFloor = 1e-8;

void check_stencil(const AlmostComplexStructure& j, const Vec& point, double step) {
  if (!j.box()) return;
  if (!j.box()->contains(point, step)) {
    throw Error(ErrorCode::stencil_out_of_domain, "difference stencil leaves the structure box");
  }
}

}  // namespace

bool Box::contains(const Vec& p, double pad) const {
  for (int a = 0; a < dim(); ++a) {
    if (p[a] - pad < lo[a] || p[a] + pad > hi[a]) return false;
  }
  return true;
}

Box Box::cube(int dim, double half_width) {
  return Box{Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width)};
}

const char* to_string(StructureFamily family) {
  switch (family) {
    case StructureFamily::standard: return "standard";
    case StructureFamily::sheared: return "sheared";
    case StructureFamily::custom: return "custom";
  }
  return "custom";
}

Mat standard_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j(2 * k + 1, 2 * k) = 1.0;
    j(2 * k, 2 * k + 1) = -1.0;
  }
  return j;
}

AlmostComplexStructure::AlmostComplexStructure(int n, Eval eval, StructureFamily family, double epsilon,
                                               std::optional<Box> box)
    : n_(n), eval_(std::move(eval)), family_(family), epsilon_(epsilon), box_(std::move(box)) {
  if (n < 1 || n > kMaxComplexDim) {
    throw Error(ErrorCode::invalid_argument, "complex dimension must be 1 or 2");
  }
}

AlmostComplexStructure AlmostComplexStructure::standard(int n) {
  Mat j = standard_j(n);
  return AlmostComplexStructure(n, [j](const Vec&) { return j; }, StructureFamily::standard);
}

AlmostComplexStructure AlmostComplexStructure::sheared(int n, double epsilon) {
  Mat jst = standard_j(n);
  const int col = (n == 1) ? 1 : 2;
  auto eval = [jst, epsilon, col](const Vec& p) {
    const double s = epsilon * p[0];
    Mat shear = Mat::Identity(jst.rows(), jst.cols());
    Mat inverse = shear;
    shear(0, col) = s;  // E is nilpotent, so (I + sE)^{-1} = I - sE
    inverse(0, col) = -s;
    return Mat(shear * jst * inverse);
  };
  return AlmostComplexStructure(n, std::move(eval), epsilon == 0.0 ? StructureFamily::standard
                                                                   : StructureFamily::sheared,
                                epsilon);
}

AlmostComplexStructure AlmostComplexStructure::from_table(int n, RegularTable table) {
  const int d = 2 * n;
  if (table.dim() != d || table.components() != d * d) {
    throw Error(ErrorCode::invalid_structure, "structure table must carry 2n x 2n entries per point");
  }
  Box box{table.lo(), table.lo()};
  for (int a = 0; a < d; ++a) box.hi[a] += table.h() * (table.counts()[a] - 1);
  auto shared = std::make_shared<RegularTable>(std::move(table));
  auto eval = [shared, d](const Vec& p) {
    Eigen::VectorXd v = (*shared)(p);
    Mat j(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) j(r, c) = v[r * d + c];
    return j;
  };
  return AlmostComplexStructure(n, std::move(eval), StructureFamily::custom, 0.0, box);
}

StructureReport validate_structure(const AlmostComplexStructure& j, std::span<const Vec> samples,
                                   double threshold) {
  if (samples.empty()) throw Error(ErrorCode::invalid_argument, "no sample points");
  StructureReport report;
  report.worst_point = samples.front();
  const int d = j.real_dim();
  for (const Vec& p : samples) {
    if (j.box() && !j.box()->contains(p)) {
      throw Error(ErrorCode::invalid_argument, "sample outside the structure box");
    }
    Mat m = j(p);
    if (m.rows() != d || m.cols() != d || !m.allFinite()) {
      throw Error(ErrorCode::invalid_structure, "J is not a finite 2n x 2n matrix");
    }
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw Error(ErrorCode::invalid_structure, "J is singular");
    double defect = (m * m + Mat::Identity(d, d)).cwiseAbs().rowwise().sum().maxCoeff();
    if (defect > report.max_defect) {
      report.max_defect = defect;
      report.worst_point = p;
    }
  }
  if (report.max_defect > threshold) {
    throw Error(ErrorCode::invalid_structure,
                "J^2 + I defect " + std::to_string(report.max_defect) + " exceeds threshold");
  }
  return report;
}

Mat HermitianMetric::g(const Vec& p) const {
  Mat j = j_(p);
  const int d = j_.real_dim();
  return 0.5 * (Mat::Identity(d, d) + j.transpose() * j);
}

Mat HermitianMetric::omega(const Vec& p) const {
  Mat j = j_(p);
  return j.transpose() * g(p);
}

cplx HermitianMetric::g(const Vec& p, const CVec& x, const CVec& y) const {
  CMat gm = g(p).cast<cplx>();
  return (x.transpose() * gm * y)(0, 0);
}

cplx HermitianMetric::omega(const Vec& p, const CVec& x, const CVec& y) const {
  CMat om = omega(p).cast<cplx>();
  return (x.transpose() * om * y)(0, 0);
}

cplx HermitianMetric::hermitian(const Vec& p, const CVec& zeta, const CVec& xi) const {
  return cplx(0.0, -2.0) * omega(p, zeta, xi.conjugate());
}

CVec project_01(const Mat& j, const CVec& x) {
  const cplx i(0.0, 1.0);
  return 0.5 * (x + i * (j.cast<cplx>() * x));
}

CVec project_10(const Mat& j, const CVec& x) {
  const cplx i(0.0, 1.0);
  return 0.5 * (x - i * (j.cast<cplx>() * x));
}

Frame::Frame(HermitianMetric metric, std::vector<int> seeds, double derivative_step)
    : metric_(std::move(metric)), seeds_(std::move(seeds)), step_(derivative_step) {
  if (static_cast<int>(seeds_.size()) != complex_dim()) {
    throw Error(ErrorCode::invalid_argument, "frame needs one seed per complex dimension");
  }
  if (!(step_ > 0.0)) throw Error(ErrorCode::invalid_argument, "derivative step must be positive");
}

namespace {

// Gram-Schmidt of `seed` against the J-invariant span of `basis` columns.
Vec orthogonalize(const Mat& g, const Mat& j, const Mat& basis, int count, Vec v) {
  for (int k = 0; k < count; ++k) {
    Vec e = basis.col(k);
    Vec je = j * e;
    v -= (e.dot(g * v)) * e + (je.dot(g * v)) * je;
  }
  return v;
}

}  // namespace

Mat Frame::real_vectors(const Vec& p) const {
  const int n = complex_dim();
  const int d = real_dim();
  Mat j = structure()(p);
  Mat g = 0.5 * (Mat::Identity(d, d) + j.transpose() * j);
  Mat e = Mat::Zero(d, n);
  for (int k = 0; k < n; ++k) {
    Vec v = Vec::Unit(d, seeds_[k]);
    v = orthogonalize(g, j, e, k, v);
    double norm = std::sqrt(v.dot(g * v));
    if (norm < kPivotFloor) {
      throw Error(ErrorCode::degenerate_frame, "Gram-Schmidt pivot below 1e-8");
    }
    e.col(k) = v / norm;
  }
  return e;
}

FrameMat Frame::operator()(const Vec& p) const {
  const cplx i(0.0, 1.0);
  Mat e = real_vectors(p);
  Mat je = structure()(p) * e;
  return 0.5 * (e.cast<cplx>() - i * je.cast<cplx>());
}

FrameJet Frame::jet(const Vec& p, double step) const {
  check_stencil(structure(), p, step);
  FrameJet out;
  out.zeta = (*this)(p);
  out.j = structure()(p);
  for (int a = 0; a < real_dim(); ++a) {
    Vec plus = p, minus = p;
    plus[a] += step;
    minus[a] -= step;
    out.d_zeta[a] = ((*this)(plus) - (*this)(minus)) / (2.0 * step);
  }
  return out;
}

Frame split_frame(const HermitianMetric& metric, const Vec& reference, const FrameOptions& options) {
  const auto& j = metric.structure();
  const int n = j.complex_dim();
  const int d = j.real_dim();
  std::vector<int> order = options.seed_order;
  if (order.empty()) {
    order.resize(d);
    std::iota(order.begin(), order.end(), 0);
  }
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int a = 0; a < static_cast<int>(sorted.size()); ++a) {
    if (sorted[a] != a || static_cast<int>(sorted.size()) != d) {
      throw Error(ErrorCode::invalid_argument, "seed order must be a permutation of coordinates");
    }
  }
  Mat jm = j(reference);
  Mat g = metric.g(reference);
  Mat e = Mat::Zero(d, n);
  std::vector<int> seeds;
  for (int k = 0; k < n; ++k) {
    double best = -1.0;
    int pick = -1;
    Vec best_v;
    for (int cand : order) {
      Vec v = orthogonalize(g, jm, e, k, Vec::Unit(d, cand));
      double norm = std::sqrt(v.dot(g * v));
      if (norm > best * (1.0 + 1e-12)) {
        best = norm;
        pick = cand;
        best_v = v;
      }
    }
    if (best < kPivotFloor) throw Error(ErrorCode::degenerate_frame, "Gram-Schmidt pivot below 1e-8");
    e.col(k) = best_v / best;
    seeds.push_back(pick);
  }
  Frame frame(metric, seeds, options.derivative_step);
  // Validate the pivoting choice at the reference point itself.
  (void)frame.real_vectors(reference);
  return frame;
}

Frame split_frame(const AlmostComplexStructure& j, const Vec& reference, const FrameOptions& options) {
  return split_frame(HermitianMetric(j), reference, options);
}

CVec bracket_mixed(const FrameJet& jet, int p, int q) {
  const int d = static_cast<int>(jet.zeta.rows());
  CVec out = CVec::Zero(d);
  for (int a = 0; a < d; ++a) {
    out += jet.zeta(a, p) * jet.d_zeta[a].col(q).conjugate();
    out -= std::conj(jet.zeta(a, q)) * jet.d_zeta[a].col(p);
  }
  return out;
}

CVec bracket_antiholomorphic(const FrameJet& jet, int p, int q) {
  const int d = static_cast<int>(jet.zeta.rows());
  CVec out = CVec::Zero(d);
  for (int a = 0; a < d; ++a) {
    out += std::conj(jet.zeta(a, p)) * jet.d_zeta[a].col(q).conjugate();
    out -= std::conj(jet.zeta(a, q)) * jet.d_zeta[a].col(p).conjugate();
  }
  return out;
}

CVec bracket_01(const Frame& frame, int p, int q, const Vec& point, double step) {
  FrameJet jet = frame.jet(point, step);
  return project_01(jet.j, bracket_mixed(jet, p, q));
}

double integrability_defect(const Frame& frame, std::span<const Vec> samples, double step) {
  double defect = 0.0;
  const int n = frame.complex_dim();
  for (const Vec& x : samples) {
    FrameJet jet = frame.jet(x, step);
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        defect = std::max(defect, project_10(jet.j, bracket_antiholomorphic(jet, p, q)).norm());
      }
    }
  }
  return defect;
}

double integrability_defect(const AlmostComplexStructure& j, const Box& region,
                            std::span<const Vec> samples, double step) {
  Frame frame = split_frame(j, region.center());
  return integrability_defect(frame, samples, step);
}

}  // namespace acma
