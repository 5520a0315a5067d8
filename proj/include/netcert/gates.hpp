#pragma once

// Measurement primitives: projective measurement sets, dichotomic
// observables, the fixed six-observable main-party convention, Bell basis
// and teleportation corrections, parallel Bell measurements, and the
// conjugation-controlled construction.
//
// Index conventions pinned here (consumed by everything downstream):
//  - main observables: A0=(Z+X)/r2, A1=(Z-X)/r2, A2=(Z-Y)/r2, A3=(Z+Y)/r2,
//    A4=(X-Y)/r2, A5=(X+Y)/r2, so (A0+A1)/r2=Z, (A0-A1)/r2=X, (A2-A3)/r2=-Y.
//  - Bell labels: 00 -> phi+, 01 -> phi-, 10 -> psi+, 11 -> psi-, i.e.
//    |beta_(b1,b2)> = (sz^b2 sx^b1 (x) 1)|phi+>.
//  - teleportation correction for outcome (b1,b2): U = sz^b2 sx^b1.
// Both conventions are exercised by self-checks on first use: the three CHSH
// blocks must reach 2*sqrt(2) on phi+, and the corrections must complete
// teleportation with weight 1/4 per outcome.

#include <mutex>
#include <string>

#include "netcert/common.hpp"
#include "netcert/spectra.hpp"
#include "netcert/state.hpp"
#include "netcert/states.hpp"
#include "netcert/tensor_ops.hpp"

namespace netcert {

enum class Pauli { Z = 0, X = 1, Y = 2 };

// A complete projective measurement: Hermitian idempotent effects that are
// mutually orthogonal and sum to the identity (all within tol::projector).
class ProjectorSet {
 public:
  ProjectorSet(SiteLayout layout, std::vector<Mat> projectors,
               std::vector<std::string> labels)
      : layout_(std::move(layout)),
        projectors_(std::move(projectors)),
        labels_(std::move(labels)) {
    require(!projectors_.empty(), "projector set must not be empty");
    require(labels_.size() == projectors_.size(),
            "one label per projector required");
    const auto d = layout_.total_dim();
    Mat sum = Mat::Zero(d, d);
    for (const Mat& p : projectors_) {
      require(p.rows() == d && p.cols() == d,
              "projector dimension does not match layout");
      require(hermiticity_defect(p) <= tol::projector,
              "projector is not Hermitian");
      require(max_abs_diff(p * p, p) <= tol::projector,
              "projector is not idempotent");
      sum += p;
    }
    require(max_abs_diff(sum, Mat::Identity(d, d)) <= tol::projector,
            "projectors do not sum to the identity");
    for (size_t a = 0; a < projectors_.size(); ++a)
      for (size_t b = a + 1; b < projectors_.size(); ++b)
        require(max_abs(projectors_[a] * projectors_[b]) <= tol::projector,
                "projectors are not mutually orthogonal");
  }

  const SiteLayout& layout() const { return layout_; }
  int size() const { return static_cast<int>(projectors_.size()); }
  const Mat& projector(int k) const {
    return projectors_.at(static_cast<size_t>(k));
  }
  const std::string& label(int k) const {
    return labels_.at(static_cast<size_t>(k));
  }

  // The +1/-1 observable of a two-outcome set.
  Mat dichotomic() const {
    require(size() == 2, "dichotomic observable needs exactly two outcomes");
    return projectors_[0] - projectors_[1];
  }

 private:
  SiteLayout layout_;
  std::vector<Mat> projectors_;
  std::vector<std::string> labels_;
};

// Hermitian operator with a +1/-1 spectrum (equivalently: Hermitian and
// unitary, both verified within tol::op_flag).
class Observable {
 public:
  explicit Observable(LinOp op) : op_(std::move(op)) {
    require(op_.hermitian(), "observable is not Hermitian");
    require(op_.unitary(), "observable spectrum is not +1/-1");
  }

  Observable(SiteLayout layout, Mat m)
      : Observable(LinOp(std::move(layout), std::move(m))) {}

  const SiteLayout& layout() const { return op_.layout(); }
  const Mat& matrix() const { return op_.matrix(); }
  const LinOp& op() const { return op_; }

  // The two-outcome projective measurement {(1+O)/2, (1-O)/2}.
  ProjectorSet projector_set() const {
    const auto d = layout_dim();
    Mat p0 = 0.5 * (Mat::Identity(d, d) + op_.matrix());
    Mat p1 = 0.5 * (Mat::Identity(d, d) - op_.matrix());
    return ProjectorSet(op_.layout(), {std::move(p0), std::move(p1)},
                        {"0", "1"});
  }

 private:
  std::int64_t layout_dim() const { return op_.layout().total_dim(); }
  LinOp op_;
};

inline Mat pauli_matrix(Pauli p) {
  Mat m(2, 2);
  switch (p) {
    case Pauli::Z: m << 1, 0, 0, -1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, cdouble(0, -1), cdouble(0, 1), 0; break;
  }
  return m;
}

inline Observable pauli(Pauli p) {
  return Observable(SiteLayout::qubits(1), pauli_matrix(p));
}

namespace detail {

inline Mat main_observable_matrix(int x) {
  const double r = 1.0 / std::numbers::sqrt2;
  const Mat z = pauli_matrix(Pauli::Z);
  const Mat sx = pauli_matrix(Pauli::X);
  const Mat y = pauli_matrix(Pauli::Y);
  switch (x) {
    case 0: return r * (z + sx);
    case 1: return r * (z - sx);
    case 2: return r * (z - y);
    case 3: return r * (z + y);
    case 4: return r * (sx - y);
    case 5: return r * (sx + y);
    default: fail("main observable index must be 0..5");
  }
}

// First-use check: all three CHSH blocks reach 2*sqrt(2) on phi+ against the
// aux Pauli triple. A convention mistake anywhere above breaks this loudly.
inline void verify_main_convention() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    const Vec phip = phi_plus().amplitudes();
    auto corr = [&](const Mat& a, const Mat& b) {
      const Mat big = Eigen::kroneckerProduct(a, b);
      return (phip.adjoint() * big * phip)(0).real();
    };
    struct Block { int x0, x1; Pauli y0, y1; };
    const Block blocks[3] = {{0, 1, Pauli::Z, Pauli::X},
                             {2, 3, Pauli::Z, Pauli::Y},
                             {4, 5, Pauli::X, Pauli::Y}};
    for (const auto& blk : blocks) {
      const Mat a0 = main_observable_matrix(blk.x0);
      const Mat a1 = main_observable_matrix(blk.x1);
      const Mat b0 = pauli_matrix(blk.y0);
      const Mat b1 = pauli_matrix(blk.y1);
      const double s =
          corr(a0, b0) + corr(a0, b1) + corr(a1, b0) - corr(a1, b1);
      if (std::abs(s - kTwoSqrtTwo) > 1e-10)
        throw std::logic_error(
            "main observable convention failed its CHSH self-check");
    }
  });
}

}  // namespace detail

// The six fixed main-party observables (see header comment for the list).
inline Observable main_observable(int x) {
  detail::verify_main_convention();
  return Observable(SiteLayout::qubits(1), detail::main_observable_matrix(x));
}

// Projector onto outcome b of the aux Pauli input y: (1 + (-1)^b sigma)/2.
inline LinOp aux_projector(int b, Pauli y) {
  require(b == 0 || b == 1, "aux outcome must be a bit");
  const double sign = (b == 0) ? 1.0 : -1.0;
  Mat m = 0.5 * (Mat::Identity(2, 2) + sign * pauli_matrix(y));
  return LinOp(SiteLayout::qubits(1), std::move(m));
}

// The four Bell states in the pinned label order 00,01,10,11.
inline PureState bell_state(int b1, int b2) {
  require((b1 == 0 || b1 == 1) && (b2 == 0 || b2 == 1),
          "Bell label must be two bits");
  Vec v = Vec::Zero(4);
  const double r = 1.0 / std::numbers::sqrt2;
  if (b1 == 0) {  // phi family: |00> +/- |11>
    v(0) = r;
    v(3) = (b2 == 0) ? r : -r;
  } else {  // psi family: |01> +/- |10>
    v(1) = r;
    v(2) = (b2 == 0) ? r : -r;
  }
  return PureState(SiteLayout::qubits(2), std::move(v));
}

// Teleportation correction for Bell outcome (b1,b2): U = sz^b2 sx^b1.
inline LinOp correction_unitary(int b1, int b2);

namespace detail {

// First-use check of the Bell-label/correction pairing: projecting the first
// two registers of phi (x) phi+ onto |beta_a> and applying U_a to the last
// register must leave phi there with weight exactly 1/4, for every outcome
// and a spread of input states.
inline void verify_teleportation_identity() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    std::vector<Vec> probes;
    probes.push_back((Vec(2) << 1, 0).finished());
    probes.push_back((Vec(2) << 1.0 / std::numbers::sqrt2,
                      1.0 / std::numbers::sqrt2).finished());
    probes.push_back((Vec(2) << 0.6, cdouble(0.0, 0.8)).finished());
    for (const Vec& phi : probes) {
      PureState input = tensor_product(
          PureState(SiteLayout::qubits(1), phi), phi_plus());
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
          const Vec beta = bell_state(b1, b2).amplitudes();
          Mat proj = beta * beta.adjoint();
          PureState projected = apply_on_sites(
              LinOp(SiteLayout::qubits(2), proj), {0, 1}, input);
          PureState corrected = apply_on_sites(correction_unitary(b1, b2),
                                               {2}, projected);
          // Expected branch: (1/2) |beta> (x) |phi>.
          Vec expect = 0.5 * Eigen::kroneckerProduct(beta, phi).eval();
          if ((corrected.amplitudes() - expect).cwiseAbs().maxCoeff() > 1e-12)
            throw std::logic_error(
                "Bell labels and corrections failed the teleportation check");
        }
    }
  });
}

}  // namespace detail

inline LinOp correction_unitary(int b1, int b2) {
  require((b1 == 0 || b1 == 1) && (b2 == 0 || b2 == 1),
          "Bell label must be two bits");
  Mat u = Mat::Identity(2, 2);
  if (b1) u = pauli_matrix(Pauli::X) * u;
  if (b2) u = pauli_matrix(Pauli::Z) * u;  // U = sz^b2 sx^b1
  return LinOp(SiteLayout::qubits(1), std::move(u));
}

// Measurement in the Bell basis on a pair of qubits, labels "00".."11" in the
// pinned order. Validated on first use by the teleportation identity.
inline ProjectorSet bell_basis() {
  detail::verify_teleportation_identity();
  std::vector<Mat> projs;
  std::vector<std::string> labels;
  for (int b1 = 0; b1 < 2; ++b1)
    for (int b2 = 0; b2 < 2; ++b2) {
      const Vec beta = bell_state(b1, b2).amplitudes();
      projs.push_back(beta * beta.adjoint());
      labels.push_back(std::string() + char('0' + b1) + char('0' + b2));
    }
  return ProjectorSet(SiteLayout::qubits(2), std::move(projs),
                      std::move(labels));
}

enum class Pairing { Even, Odd };

// The measured pairs (0-based site indices) of a parallel Bell measurement
// on n sites. Even: (0,1),(2,3),...  Odd: (n-1,0),(1,2),(3,4),...
// With odd n one site is left unmeasured.
inline std::vector<std::pair<int, int>> pairing_sites(Pairing p, int n) {
  require(n >= 2, "parallel Bell measurement needs at least two sites");
  std::vector<std::pair<int, int>> out;
  if (p == Pairing::Even) {
    for (int j = 0; j + 1 < n; j += 2) out.emplace_back(j, j + 1);
  } else {
    out.emplace_back(n - 1, 0);
    for (int j = 1; j + 1 <= n - 2; j += 2) out.emplace_back(j, j + 1);
  }
  return out;
}

// Simultaneous Bell measurements on the given pairing of n qubit sites.
// Outcomes are tuples of two-bit labels in pair order, joined by commas;
// unpaired sites are not measured (identity), so each projector has rank
// 2^(number of unpaired sites).
inline ProjectorSet parallel_bsm(Pairing pairing, int n) {
  const auto pairs = pairing_sites(pairing, n);
  const ProjectorSet bell = bell_basis();
  const SiteLayout layout = SiteLayout::qubits(n);
  const int num_pairs = static_cast<int>(pairs.size());
  std::int64_t count = 1;
  for (int k = 0; k < num_pairs; ++k) count *= 4;

  std::vector<Mat> projs;
  std::vector<std::string> labels;
  for (std::int64_t a = 0; a < count; ++a) {
    // Digits of a in base 4, first pair most significant.
    std::vector<int> digit(static_cast<size_t>(num_pairs));
    std::int64_t rem = a;
    for (int k = num_pairs; k-- > 0;) {
      digit[static_cast<size_t>(k)] = static_cast<int>(rem % 4);
      rem /= 4;
    }
    Mat p = Mat::Identity(layout.total_dim(), layout.total_dim());
    std::string label;
    for (int k = 0; k < num_pairs; ++k) {
      const auto [s1, s2] = pairs[static_cast<size_t>(k)];
      p = p * detail::embed_matrix(layout, {s1, s2},
                                   bell.projector(digit[static_cast<size_t>(k)]));
      if (k) label += ',';
      label += bell.label(digit[static_cast<size_t>(k)]);
    }
    projs.push_back(std::move(p));
    labels.push_back(std::move(label));
  }
  return ProjectorSet(layout, std::move(projs), std::move(labels));
}

// m (x) |0><0| + conj(m) (x) |1><1| with a fresh flag qubit appended after
// the operator's own sites.
inline LinOp conjugation_controlled(const LinOp& m) {
  const auto d = m.layout().total_dim();
  Mat out = Mat::Zero(2 * d, 2 * d);
  for (std::int64_t i = 0; i < d; ++i)
    for (std::int64_t j = 0; j < d; ++j) {
      out(2 * i, 2 * j) = m.matrix()(i, j);
      out(2 * i + 1, 2 * j + 1) = std::conj(m.matrix()(i, j));
    }
  return LinOp(SiteLayout::concat(m.layout(), SiteLayout::qubits(1)),
               std::move(out));
}

// Binary encoding of a uniform-qudit register: each dimension-d site becomes
// ceil(log2 d) qubit sites, big-endian, in place. Pure relabeling of
// amplitudes (an isometry onto the populated sector when d is not a power of
// two).
inline PureState encode_qudit(const PureState& psi) {
  const auto& L = psi.layout();
  const int d = L.dim(0);
  for (int s = 0; s < L.num_sites(); ++s)
    require(L.dim(s) == d, "qudit encoding requires equal site dimensions");
  int k = 0;
  while ((1 << k) < d) ++k;
  if (k == 0) k = 1;
  const int n = L.num_sites();
  const SiteLayout out_layout = SiteLayout::qubits(n * k);
  Vec v = Vec::Zero(out_layout.total_dim());
  for (std::int64_t f = 0; f < L.total_dim(); ++f) {
    const auto idx = L.unflat(f);
    std::int64_t nf = 0;
    for (int s = 0; s < n; ++s) nf = (nf << k) | idx[static_cast<size_t>(s)];
    v(nf) = psi.amplitudes()(f);
  }
  return PureState(out_layout, std::move(v), psi.subnormalized());
}

}  // namespace netcert
