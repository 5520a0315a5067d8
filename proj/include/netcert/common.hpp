#pragma once

// Shared numeric aliases and tolerance constants.
//
// Conventions used throughout the library:
//  - multi-site kets are stored as dense vectors with site 0 most significant,
//    i.e. the flat index of |i0 i1 ... i_{n-1}> is ((i0*d1 + i1)*d2 + i2)...
//  - operators are dense column-major complex matrices over the same indexing.

#include <complex>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace netcert {

using cdouble = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

namespace tol {
// Construction-time invariant tolerances.
inline constexpr double norm = 1e-12;        // state normalization
inline constexpr double hermitian = 1e-12;   // density operator Hermiticity
inline constexpr double op_flag = 1e-10;     // LinOp hermitian/unitary detection
inline constexpr double projector = 1e-10;   // idempotence/orthogonality/completeness
inline constexpr double psd_floor = -1e-10;  // eigenvalue floor for states
inline constexpr double spectral = 1e-10;    // eigensystem/Schmidt residuals
inline constexpr double behavior_row = 1e-10;     // row normalization
inline constexpr double behavior_entry = -1e-12;  // negative-entry clamp floor
inline constexpr double no_signaling = 1e-9;
inline constexpr double isometry = 1e-9;     // V^dag V = I
inline constexpr double kraus = 1e-8;        // Kraus completeness
}  // namespace tol

inline constexpr double kTwoSqrtTwo = 2.0 * std::numbers::sqrt2;
inline constexpr double kSixSqrtTwo = 6.0 * std::numbers::sqrt2;

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Largest absolute deviation of M from its own adjoint.
inline double hermiticity_defect(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double unitarity_defect(const Mat& m) {
  Mat g = m.adjoint() * m;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

[[noreturn]] inline void fail(const std::string& what) {
  throw std::invalid_argument(what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(what);
}

// Worker count for data-parallel loops. NETCERT_THREADS overrides the
// hardware default; results never depend on the value.
inline int thread_count() {
  if (const char* env = std::getenv("NETCERT_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace netcert
