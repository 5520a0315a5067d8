// Register value types and dense-register operations.

#include <catch2/catch_amalgamated.hpp>

#include "netcert/netcert.hpp"
#include "oracles.hpp"

using namespace netcert;

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752;
}

TEST_CASE("layout indexing, site 0 most significant") {
  SiteLayout l({2, 3, 2});
  REQUIRE(l.total_dim() == 12);
  REQUIRE(l.stride(0) == 6);
  REQUIRE(l.stride(1) == 2);
  REQUIRE(l.stride(2) == 1);
  REQUIRE(l.flat({1, 2, 0}) == 10);
  REQUIRE(l.unflat(10) == std::vector<int>{1, 2, 0});
  REQUIRE_THROWS(SiteLayout({2, 1}));
}

TEST_CASE("state normalization invariants") {
  Vec v = Vec::Zero(2);
  v(0) = 1.0;
  REQUIRE_NOTHROW(PureState(SiteLayout::qubits(1), v));
  v(0) = 0.9;
  REQUIRE_THROWS(PureState(SiteLayout::qubits(1), v));
  REQUIRE_NOTHROW(PureState(SiteLayout::qubits(1), v, true));
  v(0) = 1.1;
  REQUIRE_THROWS(PureState(SiteLayout::qubits(1), v, true));
}

TEST_CASE("tensor product of kets: |0> x phi+ frozen amplitudes") {
  PureState zero = basis_state(SiteLayout::qubits(1), 0);
  PureState prod = tensor_product(zero, phi_plus());
  REQUIRE(prod.layout().num_sites() == 3);
  // |0>(|00>+|11>)/sqrt(2) lives on flat indices 0 (000) and 3 (011).
  Vec expect = Vec::Zero(8);
  expect(0) = kInvSqrt2;
  expect(3) = kInvSqrt2;
  REQUIRE((prod.amplitudes() - expect).cwiseAbs().maxCoeff() < 1e-15);

  // Generic cross-check on random factors against naive index arithmetic.
  PureState a = random_state(SiteLayout({2, 3}), 11);
  PureState b = random_state(SiteLayout({2, 2}), 12);
  PureState ab = tensor_product(a, b);
  Vec ora = oracle::kron_vec(a.amplitudes(), b.amplitudes());
  REQUIRE((ab.amplitudes() - ora).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace recovers tensor factors and GHZ marginal") {
  // Frozen: tracing the last qubit of GHZ_3 leaves (|00><00| + |11><11|)/2.
  DensityOp ghz = DensityOp::from_pure(ghz_state(3));
  DensityOp red = partial_trace(ghz, {0, 1});
  Mat expect = Mat::Zero(4, 4);
  expect(0, 0) = 0.5;
  expect(3, 3) = 0.5;
  REQUIRE(max_abs_diff(red.matrix(), expect) < 1e-14);

  // Tracing out all sites must be rejected.
  REQUIRE_THROWS_WITH(partial_trace(ghz, {}),
                      Catch::Matchers::ContainsSubstring("cannot trace out"));

  // Product state: reduction recovers each factor.
  PureState a = random_state(SiteLayout({2, 2}), 21);
  PureState b = random_state(SiteLayout({3}), 22);
  DensityOp rho = DensityOp::from_pure(tensor_product(a, b));
  DensityOp ra = partial_trace(rho, {0, 1});
  DensityOp rb = partial_trace(rho, {2});
  REQUIRE(max_abs_diff(ra.matrix(),
                       a.amplitudes() * a.amplitudes().adjoint()) < 1e-12);
  REQUIRE(max_abs_diff(rb.matrix(),
                       b.amplitudes() * b.amplitudes().adjoint()) < 1e-12);

  // Random-state marginal against the naive oracle.
  PureState psi = random_state(SiteLayout({2, 2, 3}), 23);
  DensityOp full = DensityOp::from_pure(psi);
  DensityOp m01 = partial_trace(full, {0, 2});
  Mat om = oracle::partial_trace(full.matrix(), {2, 2, 3}, {0, 2});
  REQUIRE(max_abs_diff(m01.matrix(), om) < 1e-12);
}

TEST_CASE("partial transpose: involution, trace, frozen phi+ spectrum") {
  DensityOp bell = DensityOp::from_pure(phi_plus());
  LinOp pt = partial_transpose(bell, {1});
  // PT of phi+ is the two-qubit SWAP divided by 2.
  Mat swap_half = Mat::Zero(4, 4);
  swap_half(0, 0) = swap_half(3, 3) = 0.5;
  swap_half(1, 2) = swap_half(2, 1) = 0.5;
  REQUIRE(max_abs_diff(pt.matrix(), swap_half) < 1e-14);
  REQUIRE(pt.hermitian());
  REQUIRE(std::abs(pt.matrix().trace().real() - 1.0) < 1e-12);

  EigenSystem sys = hermitian_eigensystem(pt);
  RVec expect(4);
  expect << 0.5, 0.5, 0.5, -0.5;
  REQUIRE((sys.values - expect).cwiseAbs().maxCoeff() < 1e-12);

  // Involution and agreement with the naive oracle on a random state.
  PureState psi = random_state(SiteLayout({2, 2, 2}), 31);
  DensityOp rho = DensityOp::from_pure(psi);
  LinOp once = partial_transpose(rho, {0, 2});
  Mat ora = oracle::partial_transpose(rho.matrix(), {2, 2, 2}, {0, 2});
  REQUIRE(max_abs_diff(once.matrix(), ora) < 1e-14);
  DensityOp once_d(rho.layout(), once.matrix(), true, false);
  LinOp twice = partial_transpose(once_d, {0, 2});
  REQUIRE(max_abs_diff(twice.matrix(), rho.matrix()) < 1e-14);
}

TEST_CASE("hermitian eigensystem: closed-form 2x2 and invariants") {
  // (sigma_z + sigma_x)/sqrt(2) has eigenvalues +1, -1 with known vectors.
  Mat h = (oracle::sigma_z() + oracle::sigma_x()) / std::numbers::sqrt2;
  LinOp op(SiteLayout::qubits(1), h);
  REQUIRE(op.hermitian());
  EigenSystem sys = hermitian_eigensystem(op);
  REQUIRE(std::abs(sys.values(0) - 1.0) < 1e-12);
  REQUIRE(std::abs(sys.values(1) + 1.0) < 1e-12);
  // Eigenvalue sum equals the trace (here 0).
  REQUIRE(std::abs(sys.values.sum() - h.trace().real()) < 1e-12);

  // Descending order and residual on a random Hermitian matrix.
  PureState seed_vec = random_state(SiteLayout({2, 2, 2}), 41);
  Mat a = seed_vec.amplitudes() * seed_vec.amplitudes().adjoint();
  Mat b = oracle::kron(oracle::sigma_y(), oracle::kron(oracle::id2(),
                                                       oracle::sigma_z()));
  Mat rnd = a + 0.3 * b;
  LinOp rop(SiteLayout::qubits(3), rnd);
  EigenSystem rsys = hermitian_eigensystem(rop);
  for (int i = 0; i + 1 < 8; ++i) REQUIRE(rsys.values(i) >= rsys.values(i + 1));
  REQUIRE(std::abs(rsys.values.sum() - rnd.trace().real()) < 1e-10);

  // Non-Hermitian input is rejected.
  Mat nh = Mat::Zero(2, 2);
  nh(0, 1) = 1.0;
  REQUIRE_THROWS(hermitian_eigensystem(LinOp(SiteLayout::qubits(1), nh)));
}

TEST_CASE("schmidt decomposition: frozen coefficients and reconstruction") {
  // sqrt(0.8)|00> + sqrt(0.2)|11>: coefficients are known exactly.
  Vec v = Vec::Zero(4);
  v(0) = std::sqrt(0.8);
  v(3) = std::sqrt(0.2);
  PureState psi(SiteLayout::qubits(2), v);
  SchmidtDecomposition sd = schmidt_decompose(psi, {0});
  REQUIRE(std::abs(sd.coefficients(0) - std::sqrt(0.8)) < 1e-12);
  REQUIRE(std::abs(sd.coefficients(1) - std::sqrt(0.2)) < 1e-12);
  REQUIRE(sd.rank() == 2);

  // Reconstruction fidelity on a random tripartite cut.
  PureState big = random_state(SiteLayout({2, 3, 2, 2}), 51);
  SchmidtDecomposition cut = schmidt_decompose(big, {1, 3});
  REQUIRE(std::abs(cut.coefficients.squaredNorm() - 1.0) < 1e-10);
  Vec rebuilt = Vec::Zero(big.layout().total_dim());
  const auto loff =
      netcert::detail::group_offsets(big.layout(), cut.left_sites);
  const auto roff =
      netcert::detail::group_offsets(big.layout(), cut.right_sites);
  for (Eigen::Index k = 0; k < cut.coefficients.size(); ++k)
    for (size_t i = 0; i < loff.size(); ++i)
      for (size_t j = 0; j < roff.size(); ++j)
        rebuilt(loff[i] + roff[j]) += cut.coefficients(k) *
                                      cut.left_vectors(i, k) *
                                      cut.right_vectors(j, k);
  PureState rec(big.layout(), rebuilt);
  REQUIRE(fidelity(rec, big) > 1.0 - 1e-10);

  REQUIRE_THROWS(schmidt_decompose(big, {}));
  REQUIRE_THROWS(schmidt_decompose(big, {0, 1, 2, 3}));
}

TEST_CASE("fidelity: frozen values and symmetry") {
  PureState zero = basis_state(SiteLayout::qubits(1), 0);
  Vec plus(2);
  plus << kInvSqrt2, kInvSqrt2;
  PureState ps(SiteLayout::qubits(1), plus);
  REQUIRE(std::abs(fidelity(zero, ps) - 0.5) < 1e-12);
  REQUIRE(std::abs(fidelity(ps, zero) - 0.5) < 1e-12);

  DensityOp mixed = random_density(SiteLayout::qubits(2), 61);
  DensityOp other = random_density(SiteLayout::qubits(2), 62);
  const double f_ab = fidelity(mixed, other);
  const double f_ba = fidelity(other, mixed);
  REQUIRE(std::abs(f_ab - f_ba) < 1e-10);
  REQUIRE(f_ab >= 0.0);
  REQUIRE(f_ab <= 1.0);
  REQUIRE(std::abs(fidelity(mixed, mixed) - 1.0) < 1e-10);

  // Pure-vs-mixed agrees with the expectation-value formula.
  PureState probe = random_state(SiteLayout::qubits(2), 63);
  const double f = fidelity(probe, mixed);
  const cdouble direct =
      probe.amplitudes().dot(mixed.matrix() * probe.amplitudes());
  REQUIRE(std::abs(f - direct.real()) < 1e-12);

  REQUIRE_THROWS_WITH(
      fidelity(zero, random_state(SiteLayout::qubits(2), 64)),
      Catch::Matchers::ContainsSubstring("dimension mismatch"));
}

TEST_CASE("conjugation is an entrywise involution") {
  PureState psi = random_state(SiteLayout({2, 3}), 71);
  PureState conj_psi = conjugate(psi);
  for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i)
    REQUIRE(conj_psi.amplitudes()(i) == std::conj(psi.amplitudes()(i)));
  PureState back = conjugate(conj_psi);
  REQUIRE((back.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply_on_sites embeds like the naive kron construction") {
  SiteLayout layout({2, 2, 3});
  PureState psi = random_state(layout, 81);

  // Two-site operator on sites (2, 0): listed order matters.
  PureState g2 = random_state(SiteLayout({3, 2}), 82);
  Mat op2 = g2.amplitudes() * g2.amplitudes().adjoint() +
            Mat::Identity(6, 6) * 0.25;
  LinOp lop2(SiteLayout({3, 2}), op2);
  PureState applied = apply_on_sites(lop2, {2, 0}, psi);
  Mat full = oracle::embed(op2, {2, 0}, {2, 2, 3});
  Vec expect = full * psi.amplitudes();
  REQUIRE((applied.amplitudes() - expect).cwiseAbs().maxCoeff() < 1e-13);

  // Density operator route: conjugation by the embedded operator.
  DensityOp rho = random_density(layout, 83);
  DensityOp out = apply_on_sites(lop2, {2, 0}, rho);
  Mat expect_rho = full * rho.matrix() * full.adjoint();
  REQUIRE(max_abs_diff(out.matrix(), expect_rho) < 1e-13);

  // Errors: out-of-range site, dimension mismatch.
  REQUIRE_THROWS(apply_on_sites(lop2, {2, 5}, psi));
  REQUIRE_THROWS(apply_on_sites(lop2, {0, 1}, psi));
}

TEST_CASE("permute_sites relabels registers consistently") {
  PureState a = random_state(SiteLayout({2}), 91);
  PureState b = random_state(SiteLayout({3}), 92);
  PureState c = random_state(SiteLayout({2}), 93);
  PureState abc = tensor_product(tensor_product(a, b), c);
  PureState cab = permute_sites(abc, {2, 0, 1});
  PureState expect = tensor_product(tensor_product(c, a), b);
  REQUIRE((cab.amplitudes() - expect.amplitudes()).cwiseAbs().maxCoeff() <
          1e-14);

  DensityOp rho = DensityOp::from_pure(abc);
  DensityOp prho = permute_sites(rho, {2, 0, 1});
  REQUIRE(max_abs_diff(prho.matrix(), DensityOp::from_pure(cab).matrix()) <
          1e-13);
}

TEST_CASE("purify: frozen cases and round trip") {
  // purify(|0><0|) = |0>|0> up to phase.
  Mat zero_m = Mat::Zero(2, 2);
  zero_m(0, 0) = 1.0;
  PureState p0 = purify(DensityOp(SiteLayout::qubits(1), zero_m));
  REQUIRE(std::abs(std::abs(p0.amplitudes()(0)) - 1.0) < 1e-12);

  // purify(I/2) is maximally entangled with the purifier.
  PureState pmix =
      purify(DensityOp(SiteLayout::qubits(1), Mat::Identity(2, 2) * 0.5));
  SchmidtDecomposition sd = schmidt_decompose(pmix, {0});
  REQUIRE(std::abs(sd.coefficients(0) - kInvSqrt2) < 1e-12);
  REQUIRE(std::abs(sd.coefficients(1) - kInvSqrt2) < 1e-12);

  // Round trip on a random mixed state.
  DensityOp rho = random_density(SiteLayout({2, 3}), 101);
  PureState pur = purify(rho);
  DensityOp back = partial_trace(DensityOp::from_pure(pur), {0, 1});
  REQUIRE(max_abs_diff(back.matrix(), rho.matrix()) < 1e-10);

  // Negative eigenvalue below the floor is rejected.
  Mat bad = Mat::Identity(2, 2);
  bad(1, 1) = -0.5;
  bad(0, 0) = 1.5;
  REQUIRE_THROWS_WITH(
      purify(DensityOp(SiteLayout::qubits(1), bad, true, false)),
      Catch::Matchers::ContainsSubstring("negative eigenvalue"));
}

TEST_CASE("density operator invariants") {
  Mat not_herm = Mat::Zero(2, 2);
  not_herm(0, 1) = 1.0;
  REQUIRE_THROWS(DensityOp(SiteLayout::qubits(1), not_herm));

  Mat bad_trace = Mat::Identity(2, 2);
  REQUIRE_THROWS(DensityOp(SiteLayout::qubits(1), bad_trace, true, true));
  REQUIRE_NOTHROW(DensityOp(SiteLayout::qubits(1), bad_trace, false, true));

  Mat neg = Mat::Identity(2, 2);
  neg(1, 1) = -0.2;
  neg(0, 0) = 1.2;
  REQUIRE_THROWS(DensityOp(SiteLayout::qubits(1), neg, true, true));
  REQUIRE_NOTHROW(DensityOp(SiteLayout::qubits(1), neg, true, false));
}
