#pragma once

// PhysicalModel: a concrete quantum realization of a scenario. It carries a
// global pure state, the assignment of state sites to parties, and one
// projective measurement per (party, input).
//
// Fully-networked models additionally declare their sources: groups of sites
// that were emitted by independent devices. For models whose parties have not
// processed their shares the declared factorization is verified here (Schmidt
// rank one across every source cut). Models built by applying party-local
// isometries to a product of sources set locally_processed, which keeps the
// independence claim (local processing cannot correlate sources) but makes a
// site-wise factorization check meaningless; such models are accepted on the
// builder's word.

#include <algorithm>
#include <vector>

#include "netcert/gates.hpp"
#include "netcert/scenario.hpp"
#include "netcert/spectra.hpp"
#include "netcert/state.hpp"
#include "netcert/states.hpp"
#include "netcert/tensor_ops.hpp"

namespace netcert {

struct SourceDecl {
  std::vector<int> sites;
};

struct PhysicalModel {
  Scenario scenario;
  PureState global_state;
  std::vector<std::vector<int>> party_sites;          // [party] -> site list
  std::vector<std::vector<ProjectorSet>> measurements;  // [party][input]
  std::vector<SourceDecl> sources;  // fully variant only
  bool locally_processed = false;
};

inline void validate_model(const PhysicalModel& m) {
  const Scenario& sc = m.scenario;
  const int parties = sc.num_parties();
  require(static_cast<int>(m.party_sites.size()) == parties,
          "party site map has wrong party count");
  require(static_cast<int>(m.measurements.size()) == parties,
          "measurement table has wrong party count");

  std::vector<int> owner(static_cast<size_t>(m.global_state.num_sites()), -1);
  for (int p = 0; p < parties; ++p) {
    require(!m.party_sites[static_cast<size_t>(p)].empty(),
            "every party must own at least one site");
    for (int s : m.party_sites[static_cast<size_t>(p)]) {
      require(s >= 0 && s < m.global_state.num_sites(),
              "party site index out of range");
      require(owner[static_cast<size_t>(s)] < 0,
              "parties must own disjoint sites");
      owner[static_cast<size_t>(s)] = p;
    }
  }

  for (int p = 0; p < parties; ++p) {
    const auto& row = m.measurements[static_cast<size_t>(p)];
    require(static_cast<int>(row.size()) == sc.num_inputs(p),
            "party has wrong number of measurements");
    const SiteLayout local =
        m.global_state.layout().select(m.party_sites[static_cast<size_t>(p)]);
    for (int i = 0; i < sc.num_inputs(p); ++i) {
      const ProjectorSet& ps = row[static_cast<size_t>(i)];
      require(ps.size() == sc.num_outcomes(p, i),
              "measurement has wrong number of outcomes");
      require(ps.layout() == local,
              "measurement does not act on the party's sites");
    }
  }

  if (sc.variant() == Variant::Fully) {
    require(!m.sources.empty(),
            "fully-networked model must declare its sources");
    std::vector<bool> covered(
        static_cast<size_t>(m.global_state.num_sites()), false);
    for (const SourceDecl& src : m.sources) {
      require(!src.sites.empty(), "source must emit at least one site");
      for (int s : src.sites) {
        require(s >= 0 && s < m.global_state.num_sites(),
                "source site index out of range");
        require(!covered[static_cast<size_t>(s)],
                "sources must emit disjoint sites");
        covered[static_cast<size_t>(s)] = true;
      }
    }
    require(std::all_of(covered.begin(), covered.end(),
                        [](bool b) { return b; }),
            "sources must cover every site");
    if (!m.locally_processed && m.sources.size() > 1) {
      for (const SourceDecl& src : m.sources) {
        const SchmidtDecomposition sd =
            schmidt_decompose(m.global_state, src.sites);
        require(sd.rank(1e-9) == 1,
                "declared sources are not independent");
      }
    }
  } else {
    require(m.sources.empty(),
            "source declarations only apply to fully-networked models");
  }
}

namespace detail {

// Projector set for a main party's observable input: acts on the party's
// two sites (psi share, pair half), measuring the pair half.
inline ProjectorSet main_input_projectors(int x) {
  const ProjectorSet base = main_observable(x).projector_set();
  const Mat id2 = Mat::Identity(2, 2);
  std::vector<Mat> ps;
  std::vector<std::string> labels;
  for (int o = 0; o < base.size(); ++o) {
    ps.push_back(Eigen::kroneckerProduct(id2, base.projector(o)));
    labels.push_back(base.label(o));
  }
  return ProjectorSet(SiteLayout::qubits(2), std::move(ps), std::move(labels));
}

inline ProjectorSet fully_vector_projectors(const Scenario& sc, int input) {
  const std::vector<int> y = sc.fully_vector(input);
  const int n = sc.n();
  std::vector<Mat> ps;
  std::vector<std::string> labels;
  const int outcomes = 1 << n;
  ps.reserve(static_cast<size_t>(outcomes));
  for (int o = 0; o < outcomes; ++o) {
    Mat p = Mat::Ones(1, 1);
    std::string label;
    for (int j = 0; j < n; ++j) {
      const int bit = (o >> (n - 1 - j)) & 1;
      const Pauli basis = static_cast<Pauli>(y[static_cast<size_t>(j)]);
      p = Eigen::kroneckerProduct(p, aux_projector(bit, basis).matrix()).eval();
      label += char('0' + bit);
    }
    ps.emplace_back(std::move(p));
    labels.push_back(label);
  }
  return ProjectorSet(SiteLayout::qubits(n), std::move(ps), std::move(labels));
}

}  // namespace detail

// The reference experiment for a given main state psi (one qubit per main
// party). Site order: psi shares 0..N-1, pair halves held by the main
// parties N..2N-1, auxiliary pair halves 2N..3N-1.
inline PhysicalModel build_reference_model(Variant variant,
                                           const PureState& psi) {
  for (int s = 0; s < psi.num_sites(); ++s)
    require(psi.layout().dim(s) == 2, "main state must have qubit sites");
  require(psi.normalized(), "main state must be normalized");
  const int n = psi.num_sites();
  const Scenario sc(variant, n);

  PureState global = psi;
  for (int j = 0; j < n; ++j) global = tensor_product(global, phi_plus());
  // After tensoring, pair j sits at (n + 2j, n + 2j + 1); regroup so all
  // main-held halves precede all auxiliary halves.
  std::vector<int> order;
  for (int j = 0; j < n; ++j) order.push_back(j);
  for (int j = 0; j < n; ++j) order.push_back(n + 2 * j);
  for (int j = 0; j < n; ++j) order.push_back(n + 2 * j + 1);
  global = permute_sites(global, order);

  PhysicalModel m{sc, global, {}, {}, {}, false};

  for (int j = 0; j < n; ++j) m.party_sites.push_back({j, n + j});
  if (variant == Variant::Network) {
    for (int j = 0; j < n; ++j) m.party_sites.push_back({2 * n + j});
  } else {
    std::vector<int> aux;
    for (int j = 0; j < n; ++j) aux.push_back(2 * n + j);
    m.party_sites.push_back(aux);
  }

  for (int j = 0; j < n; ++j) {
    std::vector<ProjectorSet> row;
    for (int x = 0; x < 6; ++x) row.push_back(detail::main_input_projectors(x));
    row.push_back(bell_basis());
    m.measurements.push_back(std::move(row));
  }
  if (variant == Variant::Network) {
    for (int j = 0; j < n; ++j) {
      std::vector<ProjectorSet> row;
      for (int y = 0; y < 3; ++y) {
        const Observable obs = pauli(static_cast<Pauli>(y));
        row.push_back(obs.projector_set());
      }
      m.measurements.push_back(std::move(row));
    }
  } else {
    std::vector<ProjectorSet> row;
    const int vec_inputs = static_cast<int>(ipow(3, n));
    row.reserve(static_cast<size_t>(vec_inputs + 2));
    for (int i = 0; i < vec_inputs; ++i)
      row.push_back(detail::fully_vector_projectors(sc, i));
    row.push_back(parallel_bsm(Pairing::Even, n));
    row.push_back(parallel_bsm(Pairing::Odd, n));
    m.measurements.push_back(std::move(row));

    std::vector<int> psi_sites;
    for (int j = 0; j < n; ++j) psi_sites.push_back(j);
    m.sources.push_back({psi_sites});
    for (int j = 0; j < n; ++j) m.sources.push_back({{n + j, 2 * n + j}});
  }

  validate_model(m);
  return m;
}

}  // namespace netcert
