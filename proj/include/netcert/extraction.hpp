#pragma once

// Extraction of the certified state: operator regularization, the two-stage
// SWAP isometry with its conjugation flag, and the CPTP channel that teleports
// the main state onto the auxiliary parties' primed ancillas.
//
// Ancilla bookkeeping per pair: the primed qubit receives the extracted pair
// half, the double-primed qubit records whether the party's third observable
// acts as sigma_y or its conjugate. The flag gate is i*X*Y on the main side
// and i*Y*X on the auxiliary side, which puts the ideal realization in the
// all-zero flag sector and its conjugate in the all-one sector.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "netcert/behavior.hpp"
#include "netcert/spectra.hpp"

namespace netcert {

// Unitary stand-ins for sigma_z, sigma_x, sigma_y on one party's sites.
struct RegularizedTriple {
  LinOp Z, X, Y;
};

// Same eigenvectors, eigenvalues mapped to their sign (0 counts as +1).
inline LinOp regularize(const LinOp& op) {
  require(op.hermitian(), "regularize needs a hermitian operator");
  Eigen::SelfAdjointEigenSolver<Mat> es(op.matrix());
  require(es.info() == Eigen::Success, "eigendecomposition failed");
  Vec signs(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < signs.size(); ++i)
    signs(i) = es.eigenvalues()(i) < 0.0 ? -1.0 : 1.0;
  Mat out = es.eigenvectors() * signs.asDiagonal() *
            es.eigenvectors().adjoint();
  return LinOp(op.layout(), std::move(out));
}

namespace detail {

inline Mat dichotomic_observable(const ProjectorSet& ps) {
  require(ps.size() == 2, "observable needs a dichotomic measurement");
  return ps.projector(0) - ps.projector(1);
}

// Signed marginal of one coordinate of a multi-bit outcome set.
inline Mat coordinate_observable(const ProjectorSet& ps, int coord, int n) {
  require(ps.size() == (1 << n), "measurement does not have 2^n outcomes");
  Mat o = Mat::Zero(ps.projector(0).rows(), ps.projector(0).cols());
  for (int out = 0; out < ps.size(); ++out) {
    const int bit = (out >> (n - 1 - coord)) & 1;
    o += (bit ? -1.0 : 1.0) * ps.projector(out);
  }
  return o;
}

}  // namespace detail

// Pauli frame of one party. Main parties: regularized (A_0 +- A_1)/sqrt(2)
// and (A_2 - A_3)/sqrt(2); a network auxiliary party uses its three
// observables directly.
inline RegularizedTriple build_party_triple(const PhysicalModel& m,
                                            int party) {
  const Scenario& sc = m.scenario;
  require(party >= 0 && party < sc.num_parties(), "party index out of range");
  const SiteLayout layout = m.global_state.layout().select(
      m.party_sites[static_cast<size_t>(party)]);
  const auto& sets = m.measurements[static_cast<size_t>(party)];

  if (sc.is_main(party)) {
    Mat obs[4];
    for (int x = 0; x < 4; ++x)
      obs[x] = detail::dichotomic_observable(sets[static_cast<size_t>(x)]);
    const double s = 1.0 / std::numbers::sqrt2;
    return RegularizedTriple{
        regularize(LinOp(layout, s * (obs[0] + obs[1]))),
        regularize(LinOp(layout, s * (obs[0] - obs[1]))),
        regularize(LinOp(layout, s * (obs[2] - obs[3])))};
  }

  require(sc.variant() == Variant::Network,
          "the fully-networked auxiliary party needs a coordinate");
  RegularizedTriple t{
      LinOp(layout, detail::dichotomic_observable(sets[0])),
      LinOp(layout, detail::dichotomic_observable(sets[1])),
      LinOp(layout, detail::dichotomic_observable(sets[2]))};
  require(t.Z.unitary() && t.X.unitary() && t.Y.unitary(),
          "auxiliary observables must be unitary");
  return t;
}

// Coordinate frame of the fully-networked auxiliary party: the signed
// marginals of the vector inputs measuring (k, 0, ..., 0) around coordinate
// `coord`.
inline RegularizedTriple build_party_triple(const PhysicalModel& m, int party,
                                            int coord) {
  const Scenario& sc = m.scenario;
  require(sc.variant() == Variant::Fully && party == sc.n(),
          "coordinate triples only apply to the fully-networked auxiliary "
          "party");
  const int n = sc.n();
  require(coord >= 0 && coord < n, "coordinate out of range");
  const SiteLayout layout = m.global_state.layout().select(
      m.party_sites[static_cast<size_t>(party)]);
  const auto& sets = m.measurements[static_cast<size_t>(party)];

  Mat obs[3];
  for (int k = 0; k < 3; ++k) {
    const int input = k * static_cast<int>(ipow(3, n - 1 - coord));
    obs[k] = detail::coordinate_observable(
        sets[static_cast<size_t>(input)], coord, n);
  }
  RegularizedTriple t{LinOp(layout, std::move(obs[0])),
                      LinOp(layout, std::move(obs[1])),
                      LinOp(layout, std::move(obs[2]))};
  require(t.Z.unitary() && t.X.unitary() && t.Y.unitary(),
          "auxiliary observables must be unitary");
  return t;
}

// Max anticommutator norm over the three operator pairs, measured on the
// state (the algebra holds on the support, not globally, so this is a
// diagnostic rather than an invariant).
inline double anticommutation_residual(const RegularizedTriple& t,
                                       const PureState& state,
                                       const std::vector<int>& sites) {
  const auto& L = state.layout();
  auto pair_norm = [&](const LinOp& p, const LinOp& q) {
    const Vec pv = detail::apply_op_vec(state.amplitudes(), L, sites,
                                        p.matrix());
    const Vec qv = detail::apply_op_vec(state.amplitudes(), L, sites,
                                        q.matrix());
    const Vec pq = detail::apply_op_vec(qv, L, sites, p.matrix());
    const Vec qp = detail::apply_op_vec(pv, L, sites, q.matrix());
    return (pq + qp).norm();
  };
  double worst = pair_norm(t.Z, t.X);
  worst = std::max(worst, pair_norm(t.Z, t.Y));
  worst = std::max(worst, pair_norm(t.X, t.Y));
  return worst;
}

namespace detail {

// One party's half of the SWAP isometry: standard swap onto the primed
// ancilla, then the flag stage onto the double-primed ancilla. Row index
// convention: (party index)*4 + primed*2 + double_primed, matching
// apply_isometry_vec with extra = qubits(2).
inline Mat party_swap(const RegularizedTriple& t, bool main_side) {
  const SiteLayout& pl = t.Z.layout();
  const int k = pl.num_sites();
  const SiteLayout ext = SiteLayout::concat(pl, SiteLayout::qubits(2));
  const std::int64_t d = pl.total_dim();

  Mat h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  h /= std::numbers::sqrt2;
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;

  std::vector<int> psites(static_cast<size_t>(k));
  for (int s = 0; s < k; ++s) psites[static_cast<size_t>(s)] = s;
  auto controlled = [&](const Mat& g, int ctrl) {
    std::vector<int> sites = psites;
    sites.push_back(ctrl);
    return Mat(embed_matrix(ext, {ctrl}, p0) +
               embed_matrix(ext, sites, Eigen::kroneckerProduct(g, p1)));
  };

  const Mat hp = embed_matrix(ext, {k}, h);
  const Mat hpp = embed_matrix(ext, {k + 1}, h);
  const Mat flag_gate = main_side
                            ? Mat(cdouble(0, 1) * t.X.matrix() * t.Y.matrix())
                            : Mat(cdouble(0, 1) * t.Y.matrix() * t.X.matrix());

  Mat embed0 = Mat::Zero(d * 4, d);
  for (std::int64_t i = 0; i < d; ++i) embed0(i * 4, i) = 1.0;

  const Mat stage1 = controlled(t.X.matrix(), k) * hp *
                     controlled(t.Z.matrix(), k) * hp;
  const Mat stage2 = hpp * controlled(flag_gate, k + 1) * hpp;
  return stage2 * stage1 * embed0;
}

inline void require_unitary_triple(const RegularizedTriple& t) {
  require(unitarity_defect(t.Z.matrix()) <= tol::isometry &&
              unitarity_defect(t.X.matrix()) <= tol::isometry &&
              unitarity_defect(t.Y.matrix()) <= tol::isometry,
          "swap isometry requires unitary triple operators");
}

// Reduced density matrix of a pure vector on the kept sites, in the listed
// order (the vector may be subnormalized; no renormalization happens here).
inline Mat reduced_density_vec(const Vec& x, const SiteLayout& L,
                               const std::vector<int>& kept) {
  const auto koff = group_offsets(L, kept);
  const auto rest = complement_sites(L, kept);
  const auto roff = group_offsets(L, rest);
  const auto kdim = static_cast<std::int64_t>(koff.size());
  const auto rdim = static_cast<std::int64_t>(roff.size());
  // Gathering the kept-index slices as columns turns the accumulation into
  // one rank-r update, which vectorizes far better than per-slice outer
  // products.
  Mat slices(kdim, rdim);
  for (std::int64_t r = 0; r < rdim; ++r) {
    const std::int64_t base = roff[static_cast<size_t>(r)];
    for (std::int64_t i = 0; i < kdim; ++i)
      slices(i, r) = x(base + koff[static_cast<size_t>(i)]);
  }
  Mat rho = Mat::Zero(kdim, kdim);
  rho.selfadjointView<Eigen::Lower>().rankUpdate(slices);
  rho.triangularView<Eigen::StrictlyUpper>() =
      rho.triangularView<Eigen::StrictlyLower>().adjoint();
  return rho;
}

}  // namespace detail

// Two-sided SWAP isometry of one main/auxiliary pair. Consumes the joint
// input layout (main sites, then aux sites) and appends four fresh qubits in
// the order [main primed, main double-primed, aux primed, aux double-primed].
struct SwapIsometry {
  SiteLayout input;
  SiteLayout extra;
  Mat matrix;  // rows: (input index)*16 + extra index
};

inline SwapIsometry swap_isometry(const RegularizedTriple& main_triple,
                                  const RegularizedTriple& aux_triple) {
  detail::require_unitary_triple(main_triple);
  detail::require_unitary_triple(aux_triple);
  const Mat va = detail::party_swap(main_triple, true);
  const Mat vb = detail::party_swap(aux_triple, false);
  const std::int64_t da = main_triple.Z.layout().total_dim();
  const std::int64_t db = aux_triple.Z.layout().total_dim();

  Mat v = Mat::Zero(da * db * 16, da * db);
  for (std::int64_t ia = 0; ia < da; ++ia)
    for (std::int64_t ea = 0; ea < 4; ++ea)
      for (std::int64_t ib = 0; ib < db; ++ib)
        for (std::int64_t eb = 0; eb < 4; ++eb)
          for (std::int64_t ja = 0; ja < da; ++ja)
            for (std::int64_t jb = 0; jb < db; ++jb)
              v((ia * db + ib) * 16 + ea * 4 + eb, ja * db + jb) =
                  va(ia * 4 + ea, ja) * vb(ib * 4 + eb, jb);

  const double defect =
      max_abs(Mat(v.adjoint() * v - Mat::Identity(da * db, da * db)));
  require(defect <= tol::isometry, "swap isometry construction failed");
  return SwapIsometry{
      SiteLayout::concat(main_triple.Z.layout(), aux_triple.Z.layout()),
      SiteLayout::qubits(4), std::move(v)};
}

// Applies the isometry on the listed sites of the state; the four ancilla
// qubits are appended at the end of the site list.
inline PureState apply_swap_isometry(const SwapIsometry& v,
                                     const std::vector<int>& sites,
                                     const PureState& state) {
  require(static_cast<int>(sites.size()) == v.input.num_sites(),
          "site list length does not match the isometry input");
  for (size_t k = 0; k < sites.size(); ++k)
    require(state.layout().dim(sites[k]) == v.input.dim(static_cast<int>(k)),
            "isometry site dimension does not match the state");
  Vec out = detail::apply_isometry_vec(state.amplitudes(), state.layout(),
                                       sites, v.matrix, v.extra);
  return PureState(SiteLayout::concat(state.layout(), v.extra),
                   std::move(out), state.subnormalized());
}

struct ExtractionResult {
  DensityOp extracted;  // N target qubits, then N flag qubits
  double alpha = 0.0;
  double residual = 0.0;      // weight outside the two flag sectors
  double trace_defect = 0.0;  // |sum of Kraus weights - 1|
  std::string flag_pattern;   // visible flag sectors with their weights
};

namespace detail {

// The two family states on target + flag registers: psi with flags all zero,
// conj(psi) with flags all one. Orthogonal for any psi.
inline std::pair<Vec, Vec> flag_sector_vectors(const DensityOp& extracted,
                                               const PureState& psi) {
  const int n = psi.num_sites();
  for (int s = 0; s < n; ++s)
    require(psi.layout().dim(s) == 2, "target state must have qubit sites");
  require(psi.normalized(), "target state must be normalized");
  const SiteLayout& L = extracted.layout();
  require(L.num_sites() == 2 * n, "extracted state does not match the target size");
  for (int s = 0; s < 2 * n; ++s)
    require(L.dim(s) == 2, "extracted state does not match the target size");

  const std::int64_t tdim = std::int64_t{1} << n;
  Vec v0 = Vec::Zero(tdim * tdim), v1 = Vec::Zero(tdim * tdim);
  for (std::int64_t t = 0; t < tdim; ++t) {
    v0(t * tdim) = psi.amplitudes()(t);
    v1(t * tdim + (tdim - 1)) = std::conj(psi.amplitudes()(t));
  }
  return {std::move(v0), std::move(v1)};
}

}  // namespace detail

// Weight of the target x |0...0> sector and the remainder outside both
// sectors; the conjugate sector weight is 1 - alpha - residual.
inline std::pair<double, double> decompose_alpha(const DensityOp& extracted,
                                                 const PureState& psi) {
  const auto [v0, v1] = detail::flag_sector_vectors(extracted, psi);
  const double alpha = (v0.adjoint() * extracted.matrix() * v0)(0).real();
  const double beta = (v1.adjoint() * extracted.matrix() * v1)(0).real();
  return {alpha, 1.0 - alpha - beta};
}

// Fidelity of an extraction output with the flagged family member at weight
// alpha, i.e. the mixture of psi (flags zero) and conj(psi) (flags one).
inline double family_fidelity(const DensityOp& extracted, const PureState& psi,
                              double alpha) {
  require(alpha >= -tol::spectral && alpha <= 1.0 + tol::spectral,
          "alpha must lie in [0, 1]");
  const double a = std::min(1.0, std::max(0.0, alpha));
  const auto [v0, v1] = detail::flag_sector_vectors(extracted, psi);
  Mat sigma = a * (v0 * v0.adjoint()) + (1.0 - a) * (v1 * v1.adjoint());
  return fidelity(extracted, DensityOp(extracted.layout(), std::move(sigma)));
}

// The CPTP extraction channel: auxiliary-side SWAP isometries, then the sum
// over the main parties' Bell outcomes with the matching corrections on the
// primed ancillas. The output is reduced to the primed (target) and
// double-primed (flag) registers.
inline ExtractionResult extraction_channel(const PhysicalModel& m,
                                           const PureState& psi) {
  validate_model(m);
  const Scenario& sc = m.scenario;
  const int n = sc.n();
  require(psi.num_sites() == n, "target state size does not match scenario");

  Vec v = m.global_state.amplitudes();
  SiteLayout L = m.global_state.layout();
  const int base_sites = L.num_sites();
  for (int j = 0; j < n; ++j) {
    const int party = sc.variant() == Variant::Network ? n + j : n;
    const RegularizedTriple tri = sc.variant() == Variant::Network
                                      ? build_party_triple(m, party)
                                      : build_party_triple(m, party, j);
    detail::require_unitary_triple(tri);
    const Mat vb = detail::party_swap(tri, false);
    v = detail::apply_isometry_vec(v, L, m.party_sites[static_cast<size_t>(party)],
                                   vb, SiteLayout::qubits(2));
    L = SiteLayout::concat(L, SiteLayout::qubits(2));
  }

  std::vector<int> kept;
  for (int j = 0; j < n; ++j) kept.push_back(base_sites + 2 * j);
  for (int j = 0; j < n; ++j) kept.push_back(base_sites + 2 * j + 1);
  const std::int64_t kdim = std::int64_t{1} << (2 * n);

  const std::int64_t branches = ipow(4, n);
  std::vector<Mat> partial(static_cast<size_t>(branches));
  std::vector<double> weights(static_cast<size_t>(branches), 0.0);

  const int workers = static_cast<int>(std::min<std::int64_t>(
      thread_count(), branches));
  std::atomic<std::int64_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  auto body = [&](int t) {
    try {
      for (;;) {
        const std::int64_t a = next.fetch_add(1);
        if (a >= branches) break;
        Vec w = v;
        std::int64_t rem = a;
        for (int j = n; j-- > 0;) {
          const int aj = static_cast<int>(rem % 4);
          rem /= 4;
          const Mat& proj =
              m.measurements[static_cast<size_t>(j)]
                            [static_cast<size_t>(Scenario::kMainBsm)]
                                .projector(aj);
          w = detail::apply_op_vec(w, L, m.party_sites[static_cast<size_t>(j)],
                                   proj);
          if (aj != 0)
            w = detail::apply_op_vec(
                w, L, {base_sites + 2 * j},
                correction_unitary(aj >> 1, aj & 1).matrix());
        }
        weights[static_cast<size_t>(a)] = w.squaredNorm();
        partial[static_cast<size_t>(a)] =
            detail::reduced_density_vec(w, L, kept);
      }
    } catch (...) {
      errors[static_cast<size_t>(t)] = std::current_exception();
    }
  };
  if (workers <= 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(body, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Mat rho = Mat::Zero(kdim, kdim);
  double total = 0.0;
  for (std::int64_t a = 0; a < branches; ++a) {
    rho += partial[static_cast<size_t>(a)];
    total += weights[static_cast<size_t>(a)];
  }
  const double defect = std::abs(total - 1.0);
  require(defect <= tol::kraus, "Kraus completeness violation");
  rho /= total;
  rho = 0.5 * (rho + rho.adjoint()).eval();

  ExtractionResult out{
      DensityOp(SiteLayout::qubits(2 * n), std::move(rho), true, true),
      0.0, 0.0, defect, ""};
  const auto [alpha, residual] = decompose_alpha(out.extracted, psi);
  out.alpha = alpha;
  out.residual = residual;

  const std::int64_t fdim = std::int64_t{1} << n;
  for (std::int64_t f = 0; f < fdim; ++f) {
    double p = 0.0;
    for (std::int64_t t = 0; t < fdim; ++t)
      p += out.extracted.matrix()(t * fdim + f, t * fdim + f).real();
    if (p > 1e-9) {
      std::string bits;
      for (int j = n; j-- > 0;) bits += ((f >> j) & 1) ? '1' : '0';
      char buf[32];
      std::snprintf(buf, sizeof(buf), ":%.6f", p);
      if (!out.flag_pattern.empty()) out.flag_pattern += ',';
      out.flag_pattern += bits + buf;
    }
  }
  return out;
}

}  // namespace netcert
