#pragma once

// Value types for states and operators on a SiteLayout.
//
// All types are immutable after construction and validate their invariants
// when built. Operations that would break an invariant must construct a fresh
// value (and re-validate) rather than mutate in place.

#include "netcert/common.hpp"
#include "netcert/layout.hpp"

namespace netcert {

class PureState {
 public:
  PureState(SiteLayout layout, Vec amplitudes, bool subnormalized = false)
      : layout_(std::move(layout)),
        amps_(std::move(amplitudes)),
        subnormalized_(subnormalized) {
    require(amps_.size() == layout_.total_dim(),
            "amplitude count does not match layout dimension");
    const double n = amps_.norm();
    if (subnormalized_) {
      require(n <= 1.0 + tol::norm, "subnormalized state has norm above 1");
    } else {
      require(std::abs(n - 1.0) <= tol::norm,
              "state vector is not normalized");
    }
  }

  const SiteLayout& layout() const { return layout_; }
  const Vec& amplitudes() const { return amps_; }
  bool subnormalized() const { return subnormalized_; }
  bool normalized() const { return !subnormalized_; }
  int num_sites() const { return layout_.num_sites(); }
  double norm() const { return amps_.norm(); }

  cdouble amp(std::int64_t flat) const { return amps_(flat); }

 private:
  SiteLayout layout_;
  Vec amps_;
  bool subnormalized_;
};

// General linear operator. Hermitian/unitary flags are measured (within
// tol::op_flag) at construction so downstream code can rely on them.
class LinOp {
 public:
  LinOp(SiteLayout layout, Mat matrix)
      : layout_(std::move(layout)), mat_(std::move(matrix)) {
    require(mat_.rows() == mat_.cols(), "operator matrix must be square");
    require(mat_.rows() == layout_.total_dim(),
            "operator dimension does not match layout");
    hermitian_ = hermiticity_defect(mat_) <= tol::op_flag;
    unitary_ = unitarity_defect(mat_) <= tol::op_flag;
  }

  const SiteLayout& layout() const { return layout_; }
  const Mat& matrix() const { return mat_; }
  bool hermitian() const { return hermitian_; }
  bool unitary() const { return unitary_; }

 private:
  SiteLayout layout_;
  Mat mat_;
  bool hermitian_ = false;
  bool unitary_ = false;
};

// Density operator. Always Hermitian within tol::hermitian. `normalized`
// asserts unit trace; `state` additionally asserts positive semidefiniteness
// (smallest eigenvalue above tol::psd_floor). Objects like partial transposes
// of states are carried with state=false.
class DensityOp {
 public:
  DensityOp(SiteLayout layout, Mat matrix, bool normalized = true,
            bool state = true)
      : layout_(std::move(layout)),
        mat_(std::move(matrix)),
        normalized_(normalized),
        state_(state) {
    require(mat_.rows() == mat_.cols(), "density matrix must be square");
    require(mat_.rows() == layout_.total_dim(),
            "density matrix dimension does not match layout");
    require(hermiticity_defect(mat_) <= tol::hermitian,
            "density matrix is not Hermitian");
    if (normalized_)
      require(std::abs(mat_.trace().real() - 1.0) <= 1e-10 &&
                  std::abs(mat_.trace().imag()) <= 1e-10,
              "density matrix trace is not 1");
    if (state_) {
      Eigen::SelfAdjointEigenSolver<Mat> es(mat_, Eigen::EigenvaluesOnly);
      require(es.eigenvalues().minCoeff() >= tol::psd_floor,
              "density matrix has a negative eigenvalue");
    }
  }

  static DensityOp from_pure(const PureState& psi) {
    Mat m = psi.amplitudes() * psi.amplitudes().adjoint();
    return DensityOp(psi.layout(), std::move(m), !psi.subnormalized(),
                     true);
  }

  const SiteLayout& layout() const { return layout_; }
  const Mat& matrix() const { return mat_; }
  bool normalized() const { return normalized_; }
  bool is_state() const { return state_; }

 private:
  SiteLayout layout_;
  Mat mat_;
  bool normalized_;
  bool state_;
};

// Entrywise complex conjugation (an involution).
inline PureState conjugate(const PureState& psi) {
  return PureState(psi.layout(), psi.amplitudes().conjugate(),
                   psi.subnormalized());
}

inline DensityOp conjugate(const DensityOp& rho) {
  return DensityOp(rho.layout(), rho.matrix().conjugate(), rho.normalized(),
                   rho.is_state());
}

inline LinOp conjugate(const LinOp& op) {
  return LinOp(op.layout(), op.matrix().conjugate());
}

}  // namespace netcert
