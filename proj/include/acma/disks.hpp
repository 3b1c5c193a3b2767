#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acma/field.hpp"
#include "acma/geometry.hpp"

namespace acma {

struct DiskOptions {
  int degree = 16;       // total degree in (s, conj s)
  int radial = 32;       // sample rings
  int angular = 64;      // samples per ring
  int max_iterations = 50;
  double contraction_limit = 0.9;
};

/// J-holomorphic disk lambda(z), |z| <= radius, stored as a polynomial
///   lambda = sum_{j+k<=N} a_jk s^j conj(s)^k,  s = z / radius,
/// with coefficients in C^n (coordinates (x_k, y_k) read as x_k + i y_k).
class Disk {
 public:
  int complex_dim() const { return n_; }
  double radius() const { return radius_; }
  const Vec& center() const { return center_; }
  const std::vector<Vec>& jets() const { return jets_; }
  int degree() const { return degree_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }
  /// Largest ratio of successive Picard distances after the first step.
  double contraction() const { return contraction_; }

  Vec operator()(cplx z) const;
  Vec dx(cplx z) const;
  Vec dy(cplx z) const;

 private:
  friend Disk make_disk(const AlmostComplexStructure&, const Vec&, const std::vector<Vec>&, double, double,
                        const DiskOptions&);
  int n_ = 1;
  double radius_ = 0.0;
  Vec center_;
  std::vector<Vec> jets_;
  int degree_ = 0;
  std::vector<HVec> coeffs_;  // index (j, k) -> pair_index(j, k)
  double residual_ = 0.0;
  int iterations_ = 0;
  double contraction_ = 0.0;
};

/// Picard iteration lambda <- P + K[(J_st - J(lambda)) d_y lambda] where P is
/// the holomorphic jet polynomial and K inverts 2 d/dzbar with vanishing jet at 0.
/// jets = {v1} or {v1, v2} prescribe d_x lambda(0) and d_x^2 lambda(0).
/// Throws NoContraction, JetTooLong.
Disk make_disk(const AlmostComplexStructure& j, const Vec& v0, const std::vector<Vec>& jets, double radius,
               double tol, const DiskOptions& options = {});

/// Laplacian of u o lambda at 0 from polar averages at delta and 2 delta
/// (Richardson combined), delta = radius / 2. Throws DiskEscapesDomain when
/// u is not finite on the sampled circles.
double disk_laplacian_probe(const PointFunction& u, const Disk& disk);
double disk_laplacian_probe(const ScalarField& u, const Disk& disk);

struct DiskPshReport {
  double margin = 0.0;
  std::vector<double> values;  // per direction
  double max_residual = 0.0;
};

/// min over directions zeta in T^{1,0} (unit for the hermitian metric) of
/// Laplacian(u o lambda_zeta)(0), where lambda_zeta has d_x lambda(0) = 2 Re zeta.
/// The first n directions are the frame vectors, the rest are random.
DiskPshReport psh_check_disks(const PointFunction& u, const Frame& frame, const Vec& point, int samples,
                              double radius, std::uint64_t seed, double tol = 1e-10);
DiskPshReport psh_check_disks(const ScalarField& u, const Frame& frame, const Vec& point, int samples,
                              double radius, std::uint64_t seed, double tol = 1e-10);

/// Rows "re(z),im(z),coordinates..." on a polar grid.
void export_disk_csv(const Disk& disk, const std::string& path, int rings = 8, int rays = 32);

}  // namespace acma
