#pragma once

// Partial-transpose spectra, linear-inversion tomography, genuine
// multipartite entanglement checks, and the decomposition of a reconstructed
// register into the target/conjugate-target family.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "netcert/extraction.hpp"

namespace netcert {

namespace tol {
inline constexpr double schmidt_rank = 1e-9;  // singular values above count
inline constexpr double separable = 1e-9;     // max PT eigenvalue vs 1
inline constexpr double frame_rank = 1e-8;    // tomography frame completeness
inline constexpr double family_fit = 1e-9;    // reconstruction residual gates
}  // namespace tol

// Where a partial-transpose eigenvalue of a pure state comes from: a squared
// Schmidt coefficient or a symmetric/antisymmetric cross term.
enum class PtTag { Square, PlusCross, MinusCross };

struct PtEigenvalue {
  double value;
  PtTag tag;
};

struct PTSpectrum {
  std::vector<PtEigenvalue> entries;  // sorted by descending value

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(entries.size());
    for (const auto& e : entries) v.push_back(e.value);
    return v;
  }
};

// Spectrum of the partial transpose of a pure state with the given Schmidt
// coefficients: the squares, plus a +/- pair of cross products for each
// coefficient pair. Size m^2 in total.
inline PTSpectrum pt_spectrum_pure(const std::vector<double>& schmidt) {
  require(!schmidt.empty(), "Schmidt coefficient list is empty");
  double sum2 = 0.0;
  for (double lam : schmidt) {
    require(lam >= 0.0, "Schmidt coefficients must be nonnegative");
    sum2 += lam * lam;
  }
  require(std::abs(sum2 - 1.0) <= tol::family_fit,
          "Schmidt vector is not normalized");

  PTSpectrum s;
  const size_t m = schmidt.size();
  s.entries.reserve(m * m);
  for (size_t i = 0; i < m; ++i)
    s.entries.push_back({schmidt[i] * schmidt[i], PtTag::Square});
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      s.entries.push_back({schmidt[i] * schmidt[j], PtTag::PlusCross});
      s.entries.push_back({-schmidt[i] * schmidt[j], PtTag::MinusCross});
    }
  std::sort(s.entries.begin(), s.entries.end(),
            [](const PtEigenvalue& a, const PtEigenvalue& b) {
              if (a.value != b.value) return a.value > b.value;
              return static_cast<int>(a.tag) < static_cast<int>(b.tag);
            });
  return s;
}

struct PtBounds {
  double min_eig;
  double max_eig;
  bool separable;  // max eigenvalue reaches 1
};

// Eigenvalue range of the partial transpose over the listed sites. For a
// state the range always lies in [-1/2, 1]; hitting the upper end certifies
// separability across the cut.
inline PtBounds pt_bounds_check(const DensityOp& rho,
                                const std::vector<int>& subset) {
  const LinOp pt = partial_transpose(rho, subset);
  Eigen::SelfAdjointEigenSolver<Mat> es(pt.matrix(), Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "eigendecomposition failed");
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return PtBounds{lo, hi, std::abs(hi - 1.0) <= tol::separable};
}

// A projective frame for state reconstruction: effects on a common register.
struct TomographyFrame {
  SiteLayout layout;
  std::vector<Mat> elements;
};

// All n-fold Pauli-basis projectors: 3^n basis strings times 2^n outcomes,
// basis-major, coordinate 0 most significant in both indices.
inline TomographyFrame pauli_frame(int n) {
  require(n >= 1, "frame needs at least one site");
  TomographyFrame f{SiteLayout::qubits(n), {}};
  const std::int64_t settings = ipow(3, n);
  const std::int64_t outcomes = std::int64_t{1} << n;
  f.elements.reserve(static_cast<size_t>(settings * outcomes));
  for (std::int64_t s = 0; s < settings; ++s) {
    std::vector<Pauli> basis(static_cast<size_t>(n));
    std::int64_t rem = s;
    for (int j = n; j-- > 0;) {
      basis[static_cast<size_t>(j)] = static_cast<Pauli>(rem % 3);
      rem /= 3;
    }
    for (std::int64_t o = 0; o < outcomes; ++o) {
      Mat e = Mat::Identity(1, 1);
      for (int j = 0; j < n; ++j) {
        const int bit = static_cast<int>((o >> (n - 1 - j)) & 1);
        e = Eigen::kroneckerProduct(
                e, aux_projector(bit, basis[static_cast<size_t>(j)]).matrix())
                .eval();
      }
      f.elements.push_back(std::move(e));
    }
  }
  return f;
}

inline std::vector<double> born_probabilities(const TomographyFrame& frame,
                                              const DensityOp& rho) {
  require(rho.layout().total_dim() == frame.layout.total_dim(),
          "state dimension does not match the frame");
  std::vector<double> p;
  p.reserve(frame.elements.size());
  for (const Mat& e : frame.elements)
    p.push_back((e * rho.matrix()).trace().real());
  return p;
}

struct ReconstructionResult {
  DensityOp rho;               // Hermitian and unit trace; PSD only reported
  double prediction_residual;  // max |tr(E_k rho) - p_k|
  double min_eigenvalue;
};

// Linear inversion: least-squares solution of tr(E_k rho) = p_k over the
// full operator space. The frame must span that space; completeness is
// checked through the numerical rank of the design matrix.
inline ReconstructionResult reconstruct_state(const TomographyFrame& frame,
                                              const std::vector<double>& probs) {
  require(frame.elements.size() == probs.size(),
          "frame and probability counts differ");
  const std::int64_t d = frame.layout.total_dim();
  const auto k = static_cast<std::int64_t>(frame.elements.size());
  require(k >= d * d, "rank-deficient frame");

  Mat design(k, d * d);
  for (std::int64_t r = 0; r < k; ++r) {
    const Mat& e = frame.elements[static_cast<size_t>(r)];
    for (std::int64_t i = 0; i < d; ++i)
      for (std::int64_t j = 0; j < d; ++j)
        design(r, i + j * d) = e(j, i);  // so that row . vec(rho) = tr(E rho)
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(design);
  cod.setThreshold(tol::frame_rank);
  require(cod.rank() == d * d, "rank-deficient frame");

  Vec rhs(k);
  for (std::int64_t r = 0; r < k; ++r) rhs(r) = probs[static_cast<size_t>(r)];
  const Vec x = cod.solve(rhs);
  Mat rho(d, d);
  for (std::int64_t i = 0; i < d; ++i)
    for (std::int64_t j = 0; j < d; ++j) rho(i, j) = x(i + j * d);
  rho = 0.5 * (rho + rho.adjoint()).eval();

  double resid = 0.0;
  for (std::int64_t r = 0; r < k; ++r)
    resid = std::max(resid,
                     std::abs((frame.elements[static_cast<size_t>(r)] * rho)
                                  .trace()
                                  .real() -
                              probs[static_cast<size_t>(r)]));
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  return ReconstructionResult{
      DensityOp(frame.layout, std::move(rho), true, false), resid, min_eig};
}

// True iff the state is entangled across every bipartition. Bipartitions are
// enumerated as the subsets containing site 0 (other than the full set);
// rank counts singular values above the Schmidt threshold.
inline bool gme_check(const PureState& psi) {
  require(psi.normalized(), "state must be normalized");
  const SiteLayout& L = psi.layout();
  const int n = psi.num_sites();
  require(n >= 2, "entanglement across bipartitions needs at least two sites");

  for (std::int64_t mask = 0; mask + 1 < (std::int64_t{1} << (n - 1)); ++mask) {
    std::vector<int> part{0};
    for (int s = 1; s < n; ++s)
      if ((mask >> (s - 1)) & 1) part.push_back(s);
    const auto off = detail::group_offsets(L, part);
    const auto rest = detail::complement_sites(L, part);
    const auto roff = detail::group_offsets(L, rest);
    Mat block(static_cast<Eigen::Index>(off.size()),
              static_cast<Eigen::Index>(roff.size()));
    for (size_t i = 0; i < off.size(); ++i)
      for (size_t j = 0; j < roff.size(); ++j)
        block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            psi.amp(off[i] + roff[j]);
    Eigen::JacobiSVD<Mat> svd(block);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > tol::schmidt_rank) ++rank;
    if (rank < 2) return false;
  }
  return true;
}

// The operator a tomographic observer reconstructs when each party's frame
// is conjugated independently with probability weight per pattern: the
// weighted sum of partial transposes of the base state. Patterns are
// bitmasks with coordinate 0 most significant; a set bit transposes that
// party.
inline DensityOp flagged_mixture(const std::vector<double>& weights,
                                 const PureState& psi) {
  const int n = psi.num_sites();
  const auto patterns = static_cast<size_t>(std::int64_t{1} << n);
  require(weights.size() == patterns,
          "flag weights must cover every conjugation pattern");
  double sum = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "flag weights must be a probability distribution");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= tol::family_fit,
          "flag weights must be a probability distribution");

  const DensityOp base = DensityOp::from_pure(psi);
  Mat acc = Mat::Zero(psi.amplitudes().size(), psi.amplitudes().size());
  for (size_t a = 0; a < patterns; ++a) {
    if (weights[a] == 0.0) continue;
    std::vector<int> sites;
    for (int s = 0; s < n; ++s)
      if ((a >> (n - 1 - s)) & 1) sites.push_back(s);
    acc += weights[a] * partial_transpose(base, sites).matrix();
  }
  return DensityOp(psi.layout(), std::move(acc), true, false);
}

// Fits rho to alpha |psi><psi| + (1-alpha) |psi*><psi*| by one-dimensional
// least squares and accepts only if the max-norm residual is small. A real
// target makes the two family members coincide; alpha is then 1 by
// convention. Returns nothing when rho does not belong to the family.
inline std::optional<double> conjugation_decomposition(const DensityOp& rho,
                                                       const PureState& psi) {
  require(rho.layout().total_dim() == psi.amplitudes().size(),
          "state dimension does not match the target");
  const Mat p = psi.amplitudes() * psi.amplitudes().adjoint();
  const Mat q = p.conjugate();
  const Mat diff = p - q;
  const double dnorm2 = diff.squaredNorm();

  if (dnorm2 < tol::family_fit * tol::family_fit) {
    if (max_abs(Mat(rho.matrix() - p)) <= tol::family_fit) return 1.0;
    return std::nullopt;
  }
  const double alpha =
      ((diff.adjoint() * (rho.matrix() - q)).trace().real()) / dnorm2;
  const Mat residual = rho.matrix() - alpha * p - (1.0 - alpha) * q;
  if (max_abs(residual) <= tol::family_fit) return alpha;
  return std::nullopt;
}

}  // namespace netcert
