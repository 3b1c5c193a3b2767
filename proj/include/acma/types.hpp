#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace acma {

using cplx = std::complex<double>;

// Real dimension is 2n with n <= 2, so every small object has a compile-time
// upper bound and never touches the heap.
constexpr int kMaxRealDim = 4;
constexpr int kMaxComplexDim = 2;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxRealDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxRealDim, kMaxRealDim>;
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxRealDim, 1>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxRealDim, kMaxRealDim>;
/// Columns are the frame vectors zeta_p written in the coordinate basis (2n x n).
using FrameMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxRealDim, kMaxComplexDim>;
/// Hermitian n x n matrix of the complex Hessian in a frame.
using HMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComplexDim, kMaxComplexDim>;
using HVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxComplexDim, 1>;

/// Closed-form scalar function on R^{2n}.
using PointFunction = std::function<double(const Vec&)>;

enum class ErrorCode {
  invalid_argument,
  invalid_structure,
  degenerate_frame,
  stencil_out_of_domain,
  not_positive_definite,
  no_contraction,
  jet_too_long,
  disk_escapes_domain,
  empty_domain,
  not_strictly_psh,
  transversality_failure,
  degenerate_rhs,
  newton_stalled,
  lost_positivity,
  schedule_too_short,
  config_error,
  grid_mismatch,
  parse_error,
  io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace acma
