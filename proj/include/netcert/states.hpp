#pragma once

// Canonical state constructors and seeded random sampling.
//
// Random draws use an explicit xoshiro-free path: mt19937_64 plus a local
// Box-Muller transform, so sampled values are identical across platforms and
// standard-library implementations.

#include <cmath>
#include <random>

#include "netcert/common.hpp"
#include "netcert/state.hpp"

namespace netcert {

inline PureState basis_state(const SiteLayout& layout, std::int64_t flat) {
  Vec v = Vec::Zero(layout.total_dim());
  v(flat) = 1.0;
  return PureState(layout, std::move(v));
}

// (|00> + |11>)/sqrt(2)
inline PureState phi_plus() {
  Vec v = Vec::Zero(4);
  v(0) = v(3) = 1.0 / std::numbers::sqrt2;
  return PureState(SiteLayout::qubits(2), std::move(v));
}

inline PureState ghz_state(int n) {
  require(n >= 1, "ghz_state needs at least one qubit");
  const auto layout = SiteLayout::qubits(n);
  Vec v = Vec::Zero(layout.total_dim());
  v(0) = 1.0 / std::numbers::sqrt2;
  v(layout.total_dim() - 1) = 1.0 / std::numbers::sqrt2;
  return PureState(layout, std::move(v));
}

inline PureState w_state(int n) {
  require(n >= 2, "w_state needs at least two qubits");
  const auto layout = SiteLayout::qubits(n);
  Vec v = Vec::Zero(layout.total_dim());
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) v(std::int64_t{1} << k) = a;
  return PureState(layout, std::move(v));
}

namespace detail {

class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  // Standard normal via Box-Muller on explicitly drawn uniforms.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  cdouble complex_normal() { return {normal(), normal()}; }

 private:
  double uniform01() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace detail

inline PureState random_state(const SiteLayout& layout, std::uint64_t seed) {
  detail::GaussianSource g(seed);
  Vec v(layout.total_dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g.complex_normal();
  v /= v.norm();
  return PureState(layout, std::move(v));
}

// Haar-distributed unitary via QR of a Ginibre matrix with the standard
// phase fix (R diagonal made positive).
inline Mat haar_unitary(int dim, std::uint64_t seed) {
  detail::GaussianSource g(seed);
  Mat z(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) z(i, j) = g.complex_normal();
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const cdouble d = r(k, k);
    const double a = std::abs(d);
    if (a > 0) q.col(k) *= d / a;
  }
  return q;
}

// Haar-random isometry C^in -> C^out (the first `in` columns of a Haar
// unitary on the larger space).
inline Mat haar_isometry(int out_dim, int in_dim, std::uint64_t seed) {
  require(out_dim >= in_dim, "isometry must not shrink the space");
  return haar_unitary(out_dim, seed).leftCols(in_dim);
}

// Random density operator of the given rank profile: a partial trace of a
// random pure state on a doubled register.
inline DensityOp random_density(const SiteLayout& layout, std::uint64_t seed) {
  const auto d = layout.total_dim();
  detail::GaussianSource g(seed);
  Mat a(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) a(i, j) = g.complex_normal();
  Mat rho = a * a.adjoint();
  rho /= rho.trace().real();
  Mat herm = 0.5 * (rho + rho.adjoint());
  return DensityOp(layout, std::move(herm), true, true);
}

}  // namespace netcert
