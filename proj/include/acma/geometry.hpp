#pragma once

#include <optional>
#include <span>
#include <vector>

#include "acma/tabulated.hpp"
#include "acma/types.hpp"

namespace acma {

/// Axis-aligned box in R^{2n}.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& p, double pad = 0.0) const;
  Vec center() const { return 0.5 * (lo + hi); }
  static Box cube(int dim, double half_width);
};

enum class StructureFamily { standard, sheared, custom };

const char* to_string(StructureFamily family);

/// Coordinates are ordered (x_1, y_1, ..., x_n, y_n); the standard structure
/// sends d/dx_k to d/dy_k.
Mat standard_j(int n);

/// Smooth field of endomorphisms J(p) with J(p)^2 = -I on a coordinate box.
class AlmostComplexStructure {
 public:
  using Eval = std::function<Mat(const Vec&)>;

  AlmostComplexStructure(int n, Eval eval, StructureFamily family, double epsilon = 0.0,
                         std::optional<Box> box = std::nullopt);

  static AlmostComplexStructure standard(int n);
  /// J_eps(p) = S(p) J_st S(p)^{-1} with S(p) = I + eps * x_1 * E, where E is
  /// the unit matrix sending d/dx_2 to d/dx_1 (n = 2) or d/dy_1 to d/dx_1 (n = 1).
  /// J_eps^2 = -I holds exactly; eps = 0 gives the standard structure.
  static AlmostComplexStructure sheared(int n, double epsilon);
  /// Structure given by samples of the 2n x 2n matrix on a regular grid.
  static AlmostComplexStructure from_table(int n, RegularTable table);

  int complex_dim() const { return n_; }
  int real_dim() const { return 2 * n_; }
  StructureFamily family() const { return family_; }
  double epsilon() const { return epsilon_; }
  const std::optional<Box>& box() const { return box_; }

  Mat operator()(const Vec& p) const { return eval_(p); }

 private:
  int n_;
  Eval eval_;
  StructureFamily family_;
  double epsilon_;
  std::optional<Box> box_;
};

struct StructureReport {
  double max_defect = 0.0;
  Vec worst_point;
};

/// max ||J(p)^2 + I||_inf over samples. Throws InvalidStructure when a sample
/// is singular or the defect exceeds the threshold.
StructureReport validate_structure(const AlmostComplexStructure& j, std::span<const Vec> samples,
                                   double threshold = 1e-10);

/// Metric induced by J from the Euclidean product:
///   g(X, Y) = (<X, Y> + <JX, JY>) / 2,   omega(X, Y) = g(JX, Y).
/// With this sign omega is the standard Kahler form dx ^ dy for J_st.
class HermitianMetric {
 public:
  explicit HermitianMetric(AlmostComplexStructure j) : j_(std::move(j)) {}

  const AlmostComplexStructure& structure() const { return j_; }
  Mat g(const Vec& p) const;
  Mat omega(const Vec& p) const;

  /// Complex-bilinear extensions.
  cplx g(const Vec& p, const CVec& x, const CVec& y) const;
  cplx omega(const Vec& p, const CVec& x, const CVec& y) const;

  /// Hermitian product on T^{1,0} normalized so that d/dz_p are orthonormal
  /// for J_st: h(zeta, xi) = -2i * omega(zeta, conj(xi)) = 2 g(zeta, conj(xi)).
  cplx hermitian(const Vec& p, const CVec& zeta, const CVec& xi) const;

 private:
  AlmostComplexStructure j_;
};

CVec project_01(const Mat& j, const CVec& x);  // (X + iJX) / 2
CVec project_10(const Mat& j, const CVec& x);  // (X - iJX) / 2

/// Frame coefficients at a point together with their first coordinate
/// derivatives (central differences of the closed-form frame).
struct FrameJet {
  FrameMat zeta;                                   // 2n x n
  std::array<FrameMat, kMaxRealDim> d_zeta;        // d_a zeta
  Mat j;
};

struct FrameOptions {
  /// Order in which coordinate vectors are offered as Gram-Schmidt seeds.
  /// Empty means natural order.
  std::vector<int> seed_order;
  /// Step for differencing frame coefficients.
  double derivative_step = 1e-5;
};

/// Global frame zeta_p = (e_p - i J e_p) / 2 of T^{1,0}, where e_1, Je_1, ...,
/// e_n, Je_n is g-orthonormal. The seed vectors are fixed once (pivoting at a
/// reference point) so the frame is smooth on the whole box.
class Frame {
 public:
  Frame(HermitianMetric metric, std::vector<int> seeds, double derivative_step);

  const HermitianMetric& metric() const { return metric_; }
  const AlmostComplexStructure& structure() const { return metric_.structure(); }
  int complex_dim() const { return structure().complex_dim(); }
  int real_dim() const { return structure().real_dim(); }
  const std::vector<int>& seeds() const { return seeds_; }
  double derivative_step() const { return step_; }

  /// Orthonormal real vectors e_p as columns (2n x n).
  Mat real_vectors(const Vec& p) const;
  FrameMat operator()(const Vec& p) const;
  FrameJet jet(const Vec& p) const { return jet(p, step_); }
  FrameJet jet(const Vec& p, double step) const;

 private:
  HermitianMetric metric_;
  std::vector<int> seeds_;
  double step_;
};

/// Pivots seeds at `reference` (largest Gram-Schmidt residual among the
/// candidates, ties to the earlier candidate). Throws DegenerateFrame when a
/// pivot falls below 1e-8.
Frame split_frame(const HermitianMetric& metric, const Vec& reference, const FrameOptions& options = {});
Frame split_frame(const AlmostComplexStructure& j, const Vec& reference, const FrameOptions& options = {});

/// Lie bracket [zeta_p, conj(zeta_q)] from a frame jet.
CVec bracket_mixed(const FrameJet& jet, int p, int q);
/// Lie bracket [conj(zeta_p), conj(zeta_q)] from a frame jet.
CVec bracket_antiholomorphic(const FrameJet& jet, int p, int q);

/// Pi^{0,1}([zeta_p, conj(zeta_q)]) at `point`, frame differenced with `step`.
/// Throws StencilOutOfDomain when the stencil leaves the structure's box.
CVec bracket_01(const Frame& frame, int p, int q, const Vec& point, double step);

/// max over samples and pairs of |Pi^{1,0}([conj(zeta_p), conj(zeta_q)])|.
/// Zero up to differencing error iff J is integrable.
double integrability_defect(const Frame& frame, std::span<const Vec> samples, double step);
double integrability_defect(const AlmostComplexStructure& j, const Box& region,
                            std::span<const Vec> samples, double step);

}  // namespace acma
