#pragma once

// Spectral operations: Hermitian eigensystems, Schmidt decomposition,
// purification, and state fidelity.

#include <optional>

#include "netcert/common.hpp"
#include "netcert/state.hpp"
#include "netcert/tensor_ops.hpp"

namespace netcert {

struct EigenSystem {
  RVec values;   // descending
  Mat vectors;   // column k pairs with values(k)
};

// Eigendecomposition of a Hermitian operator, eigenvalues descending.
// Within degenerate eigenspaces the choice of basis is solver-dependent;
// callers must not rely on individual eigenvectors there.
inline EigenSystem hermitian_eigensystem(const LinOp& op) {
  require(op.hermitian(), "operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(op.matrix());
  require(es.info() == Eigen::Success, "eigensolver failed to converge");
  const auto n = es.eigenvalues().size();
  EigenSystem sys;
  sys.values = RVec(n);
  sys.vectors = Mat(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sys.values(k) = es.eigenvalues()(n - 1 - k);
    sys.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  const double residual =
      (op.matrix() * sys.vectors - sys.vectors * sys.values.asDiagonal())
          .cwiseAbs()
          .maxCoeff();
  require(residual < tol::spectral, "eigensystem residual out of tolerance");
  return sys;
}

struct SchmidtDecomposition {
  RVec coefficients;       // descending, sum of squares = squared norm
  Mat left_vectors;        // columns, on the left block (ascending site order)
  Mat right_vectors;       // columns, on the complement block
  std::vector<int> left_sites;
  std::vector<int> right_sites;

  int rank(double threshold = 1e-9) const {
    int r = 0;
    for (Eigen::Index k = 0; k < coefficients.size(); ++k)
      if (coefficients(k) > threshold) ++r;
    return r;
  }
};

// Schmidt decomposition across the given bipartition:
// psi = sum_k c_k |left_k> (x) |right_k>.
inline SchmidtDecomposition schmidt_decompose(const PureState& psi,
                                              std::vector<int> left_sites) {
  const auto& L = psi.layout();
  std::sort(left_sites.begin(), left_sites.end());
  require(!left_sites.empty() &&
              static_cast<int>(left_sites.size()) < L.num_sites(),
          "bipartition must be a nonempty proper subset of the sites");
  const auto right_sites = detail::complement_sites(L, left_sites);
  const auto loff = detail::group_offsets(L, left_sites);
  const auto roff = detail::group_offsets(L, right_sites);
  const auto ld = static_cast<std::int64_t>(loff.size());
  const auto rd = static_cast<std::int64_t>(roff.size());

  Mat m(ld, rd);
  for (std::int64_t i = 0; i < ld; ++i)
    for (std::int64_t j = 0; j < rd; ++j)
      m(i, j) = psi.amplitudes()(loff[static_cast<size_t>(i)] +
                                 roff[static_cast<size_t>(j)]);

  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.left_vectors = svd.matrixU();
  out.right_vectors = svd.matrixV().conjugate();
  out.left_sites = left_sites;
  out.right_sites = right_sites;

  if (!psi.subnormalized())
    require(std::abs(out.coefficients.squaredNorm() - 1.0) <= tol::spectral,
            "Schmidt coefficients do not square-sum to 1");
  // Reconstruction check: the factored form must reproduce the input.
  Mat rec = Mat::Zero(ld, rd);
  for (Eigen::Index k = 0; k < out.coefficients.size(); ++k)
    rec += out.coefficients(k) * out.left_vectors.col(k) *
           out.right_vectors.col(k).transpose();
  require((rec - m).cwiseAbs().maxCoeff() < tol::spectral,
          "Schmidt reconstruction out of tolerance");
  return out;
}

// Purification with one appended purifier site of dimension equal to the
// operator dimension: psi = sum_i sqrt(lambda_i) |v_i> (x) |i>.
inline PureState purify(const DensityOp& rho) {
  LinOp as_op(rho.layout(), rho.matrix());
  EigenSystem sys = hermitian_eigensystem(as_op);
  const auto d = sys.values.size();
  for (Eigen::Index i = 0; i < d; ++i)
    require(sys.values(i) >= tol::psd_floor,
            "cannot purify: negative eigenvalue below floor");
  Vec v = Vec::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lam = std::max(sys.values(i), 0.0);
    if (lam == 0.0) continue;
    const double s = std::sqrt(lam);
    for (Eigen::Index r = 0; r < d; ++r)
      v(r * d + i) = s * sys.vectors(r, i);
  }
  SiteLayout out = SiteLayout::concat(
      rho.layout(), SiteLayout({static_cast<int>(d)}));
  if (rho.normalized()) v /= v.norm();  // absorb eigenvalue-sum roundoff
  return PureState(out, std::move(v), !rho.normalized());
}

namespace detail {

inline Mat hermitian_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  RVec vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Uhlmann fidelity, specialized where one or both arguments are pure.
// Symmetric in its arguments; result clamped to [0, 1].
inline double fidelity(const PureState& a, const PureState& b) {
  require(a.layout().total_dim() == b.layout().total_dim(),
          "fidelity: dimension mismatch");
  const cdouble ov = a.amplitudes().dot(b.amplitudes());
  return std::min(1.0, std::norm(ov));
}

inline double fidelity(const PureState& a, const DensityOp& b) {
  require(a.layout().total_dim() == b.layout().total_dim(),
          "fidelity: dimension mismatch");
  const cdouble v =
      a.amplitudes().dot(b.matrix() * a.amplitudes());
  return std::clamp(v.real(), 0.0, 1.0);
}

inline double fidelity(const DensityOp& a, const PureState& b) {
  return fidelity(b, a);
}

inline double fidelity(const DensityOp& a, const DensityOp& b) {
  require(a.layout().total_dim() == b.layout().total_dim(),
          "fidelity: dimension mismatch");
  const Mat sa = detail::hermitian_sqrt(a.matrix());
  const Mat inner = sa * b.matrix() * sa;
  Eigen::SelfAdjointEigenSolver<Mat> es(inner, Eigen::EigenvaluesOnly);
  double f = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    f += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return std::clamp(f * f, 0.0, 1.0);
}

}  // namespace netcert
