#pragma once

// Physical realizations to exercise certification and extraction against:
// the reference itself, its global conjugate, the flagged superposition of
// both, locally rotated (isometry-embedded) copies, and a noisy negative
// control.

#include <cstdint>
#include <vector>

#include "netcert/behavior.hpp"
#include "netcert/spectra.hpp"

namespace netcert {

struct AdversaryKind {
  enum class Tag {
    ExactReference,
    GlobalConjugate,
    FlaggedSuperposition,
    IsometryEmbedded,
    Noisy,
  };

  Tag tag = Tag::ExactReference;
  double alpha = 1.0;        // FlaggedSuperposition: weight of the target
  std::uint64_t seed = 0;    // IsometryEmbedded: draws the local isometries
  double visibility = 1.0;   // Noisy: Werner mixing strength
  int noisy_pair = 0;        // Noisy: which shared pair degrades

  static AdversaryKind exact_reference() { return {}; }
  static AdversaryKind global_conjugate() {
    AdversaryKind k;
    k.tag = Tag::GlobalConjugate;
    return k;
  }
  static AdversaryKind flagged_superposition(double alpha) {
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    AdversaryKind k;
    k.tag = Tag::FlaggedSuperposition;
    k.alpha = alpha;
    return k;
  }
  static AdversaryKind isometry_embedded(std::uint64_t seed) {
    AdversaryKind k;
    k.tag = Tag::IsometryEmbedded;
    k.seed = seed;
    return k;
  }
  static AdversaryKind noisy(double visibility, int pair = 0) {
    require(visibility >= 0.0 && visibility <= 1.0,
            "visibility must lie in [0, 1]");
    AdversaryKind k;
    k.tag = Tag::Noisy;
    k.visibility = visibility;
    k.noisy_pair = pair;
    return k;
  }
};

namespace detail {

inline std::vector<ProjectorSet> conjugate_projector_row(
    const std::vector<ProjectorSet>& row) {
  std::vector<ProjectorSet> out;
  out.reserve(row.size());
  for (const ProjectorSet& ps : row) {
    std::vector<Mat> mats;
    std::vector<std::string> labels;
    mats.reserve(static_cast<size_t>(ps.size()));
    for (int o = 0; o < ps.size(); ++o) {
      mats.push_back(ps.projector(o).conjugate());
      labels.push_back(ps.label(o));
    }
    out.emplace_back(ps.layout(), std::move(mats), std::move(labels));
  }
  return out;
}

inline PhysicalModel conjugated_realization(PhysicalModel m) {
  m.global_state = conjugate(m.global_state);
  for (auto& row : m.measurements) row = conjugate_projector_row(row);
  return m;
}

// One flag qubit per party, maximally correlated: the global state is
// sqrt(alpha) psi x |0...0> + sqrt(1-alpha) psi* x |1...1>, and every
// measurement applies the party's reference operator or its conjugate
// depending on the party's flag.
inline PhysicalModel flagged_realization(PhysicalModel m, double alpha) {
  const int parties = m.scenario.num_parties();
  const int base = m.global_state.num_sites();
  const std::int64_t rdim = m.global_state.layout().total_dim();
  const std::int64_t fdim = std::int64_t{1} << parties;

  Vec v = Vec::Zero(rdim * fdim);
  const double a0 = std::sqrt(alpha), a1 = std::sqrt(1.0 - alpha);
  for (std::int64_t r = 0; r < rdim; ++r) {
    v(r * fdim) = a0 * m.global_state.amp(r);
    v(r * fdim + (fdim - 1)) = a1 * std::conj(m.global_state.amp(r));
  }
  m.global_state = PureState(
      SiteLayout::concat(m.global_state.layout(), SiteLayout::qubits(parties)),
      std::move(v));

  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  for (int p = 0; p < parties; ++p) {
    m.party_sites[static_cast<size_t>(p)].push_back(base + p);
    for (ProjectorSet& ps : m.measurements[static_cast<size_t>(p)]) {
      std::vector<Mat> mats;
      std::vector<std::string> labels;
      mats.reserve(static_cast<size_t>(ps.size()));
      for (int o = 0; o < ps.size(); ++o) {
        mats.push_back(Eigen::kroneckerProduct(ps.projector(o), p0) +
                       Eigen::kroneckerProduct(
                           Mat(ps.projector(o).conjugate()), p1));
        labels.push_back(ps.label(o));
      }
      ps = ProjectorSet(SiteLayout::concat(ps.layout(), SiteLayout::qubits(1)),
                        std::move(mats), std::move(labels));
    }
  }
  return m;
}

// Pushes each party through a Haar-random isometry into one extra qubit.
// Measurements are conjugated by the isometry; the range complement is
// folded into outcome 0, where the embedded state never reaches it.
inline PhysicalModel embedded_realization(PhysicalModel m,
                                          std::uint64_t seed) {
  const int parties = m.scenario.num_parties();
  const int base = m.global_state.num_sites();

  Vec v = m.global_state.amplitudes();
  SiteLayout L = m.global_state.layout();
  for (int p = 0; p < parties; ++p) {
    auto& sites = m.party_sites[static_cast<size_t>(p)];
    std::int64_t d = 1;
    for (int s : sites) d *= L.dim(s);
    const Mat u = haar_unitary(static_cast<int>(2 * d),
                               seed + 0x9e3779b97f4a7c15ull *
                                          static_cast<std::uint64_t>(p + 1));
    Mat embed0 = Mat::Zero(2 * d, d);
    for (std::int64_t i = 0; i < d; ++i) embed0(i * 2, i) = 1.0;
    const Mat w = u * embed0;

    v = apply_isometry_vec(v, L, sites, w, SiteLayout::qubits(1));
    L = SiteLayout::concat(L, SiteLayout::qubits(1));

    const Mat complement = Mat::Identity(2 * d, 2 * d) - w * w.adjoint();
    for (ProjectorSet& ps : m.measurements[static_cast<size_t>(p)]) {
      std::vector<Mat> mats;
      std::vector<std::string> labels;
      for (int o = 0; o < ps.size(); ++o) {
        Mat proj = w * ps.projector(o) * w.adjoint();
        if (o == 0) proj += complement;
        mats.push_back(std::move(proj));
        labels.push_back(ps.label(o));
      }
      ps = ProjectorSet(SiteLayout::concat(ps.layout(), SiteLayout::qubits(1)),
                        std::move(mats), std::move(labels));
    }
    sites.push_back(base + p);
  }
  m.global_state = PureState(L, std::move(v));

  if (m.scenario.variant() == Variant::Fully) {
    for (int p = 0; p < parties; ++p) m.sources.push_back({{base + p}});
    m.locally_processed = true;
  }
  return m;
}

// Werner-type degradation of one shared pair: the pair's state becomes
// v phi+ + (1-v) I/4, purified into an extra site nobody owns.
inline PhysicalModel noisy_realization(Variant variant, const PureState& psi,
                                       double visibility, int pair) {
  const int n = psi.num_sites();
  require(pair >= 0 && pair < n, "pair index out of range");
  PhysicalModel m = build_reference_model(variant, psi);

  const Mat bell = phi_plus().amplitudes() * phi_plus().amplitudes().adjoint();
  const Mat werner =
      visibility * bell + (1.0 - visibility) / 4.0 * Mat::Identity(4, 4);
  const PureState purified =
      purify(DensityOp(SiteLayout::qubits(2), werner));  // pair + purifier

  PureState global = psi;
  for (int k = 0; k < n; ++k) {
    if (k == pair)
      global = tensor_product(global, purified);
    else
      global = tensor_product(global, phi_plus());
  }
  // Pair k starts right after psi plus the sites of earlier pairs; regroup
  // into the reference order with the purifier appended last.
  std::vector<int> main_half(static_cast<size_t>(n)), aux_half(static_cast<size_t>(n));
  int cursor = n;
  int purifier = -1;
  for (int k = 0; k < n; ++k) {
    main_half[static_cast<size_t>(k)] = cursor;
    aux_half[static_cast<size_t>(k)] = cursor + 1;
    cursor += 2;
    if (k == pair) purifier = cursor++;
  }
  std::vector<int> order;
  for (int j = 0; j < n; ++j) order.push_back(j);
  for (int j = 0; j < n; ++j) order.push_back(main_half[static_cast<size_t>(j)]);
  for (int j = 0; j < n; ++j) order.push_back(aux_half[static_cast<size_t>(j)]);
  order.push_back(purifier);
  m.global_state = permute_sites(global, order);

  if (variant == Variant::Fully) {
    // The degraded source emits the purifier as part of its system.
    m.sources[static_cast<size_t>(1 + pair)].sites.push_back(3 * n);
  }
  validate_model(m);
  return m;
}

}  // namespace detail

inline PhysicalModel make_model(const AdversaryKind& kind,
                                const PureState& psi, Variant variant) {
  switch (kind.tag) {
    case AdversaryKind::Tag::ExactReference:
      return build_reference_model(variant, psi);
    case AdversaryKind::Tag::GlobalConjugate:
      return detail::conjugated_realization(
          build_reference_model(variant, psi));
    case AdversaryKind::Tag::FlaggedSuperposition:
      require(variant == Variant::Network, "violates source independence");
      return detail::flagged_realization(
          build_reference_model(variant, psi), kind.alpha);
    case AdversaryKind::Tag::IsometryEmbedded:
      return detail::embedded_realization(
          build_reference_model(variant, psi), kind.seed);
    case AdversaryKind::Tag::Noisy:
      return detail::noisy_realization(variant, psi, kind.visibility,
                                       kind.noisy_pair);
  }
  fail("unknown adversary kind");
}

// Largest probability difference between the two models' full tables.
inline double behavior_equivalence(const PhysicalModel& a,
                                   const PhysicalModel& b) {
  require(a.scenario.variant() == b.scenario.variant() &&
              a.scenario.n() == b.scenario.n(),
          "scenario mismatch");
  const Behavior ba = behavior_of(a);
  const Behavior bb = behavior_of(b);
  double worst = 0.0;
  const std::int64_t tuples = a.scenario.num_input_tuples();
  for (std::int64_t f = 0; f < tuples; ++f) {
    const std::vector<int> inputs = a.scenario.input_unflat(f);
    const auto& ra = ba.row(inputs);
    const auto& rb = bb.row(inputs);
    for (size_t i = 0; i < ra.size(); ++i)
      worst = std::max(worst, std::abs(ra[i] - rb[i]));
  }
  return worst;
}

}  // namespace netcert
