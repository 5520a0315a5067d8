#pragma once

// Behavior tables: the conditional outcome distributions P(outcomes | inputs)
// of a model, stored per input tuple. A behavior may be partial (only some
// input rows present); consumers say which rows they need.
//
// behavior_of evaluates rows by a depth-first sweep over the parties,
// projecting the global state one party at a time and pruning branches whose
// weight has hit zero. Rows are independent, so they are distributed over
// NETCERT_THREADS workers; every row is written to its own pre-assigned slot,
// which keeps the result bit-identical for any worker count.

#include <algorithm>
#include <atomic>
#include <unordered_map>
#include <utility>

#include "netcert/model.hpp"

namespace netcert {

class Behavior {
 public:
  explicit Behavior(Scenario sc)
      : scenario_(sc),
        rows_(static_cast<size_t>(sc.num_input_tuples())) {}

  const Scenario& scenario() const { return scenario_; }

  bool has_row(const std::vector<int>& inputs) const {
    return !rows_[static_cast<size_t>(scenario_.input_flat(inputs))].empty();
  }

  const std::vector<double>& row(const std::vector<int>& inputs) const {
    const auto& r = rows_[static_cast<size_t>(scenario_.input_flat(inputs))];
    require(!r.empty(), "behavior row is missing");
    return r;
  }

  double prob(const std::vector<int>& inputs,
              const std::vector<int>& outcomes) const {
    return row(inputs)[static_cast<size_t>(
        scenario_.outcome_flat(inputs, outcomes))];
  }

  // Stores one row after checking it is a distribution: entries may dip
  // below zero only by rounding (clamped), and the row must sum to one.
  void set_row(const std::vector<int>& inputs, std::vector<double> probs) {
    require(static_cast<std::int64_t>(probs.size()) ==
                scenario_.num_outcome_tuples(inputs),
            "behavior row has the wrong number of entries");
    double sum = 0.0;
    for (double& p : probs) {
      require(p >= tol::behavior_entry, "behavior entry is negative");
      if (p < 0.0) p = 0.0;
      require(p <= 1.0 + tol::behavior_row, "behavior entry exceeds one");
      sum += p;
    }
    require(std::abs(sum - 1.0) <= tol::behavior_row,
            "behavior row does not sum to one");
    auto& slot = rows_[static_cast<size_t>(scenario_.input_flat(inputs))];
    if (slot.empty()) ++present_;
    slot = std::move(probs);
  }

  bool complete() const { return present_ == scenario_.num_input_tuples(); }
  std::int64_t num_rows_present() const { return present_; }

  std::vector<std::int64_t> present_rows() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<size_t>(present_));
    for (size_t f = 0; f < rows_.size(); ++f)
      if (!rows_[f].empty()) out.push_back(static_cast<std::int64_t>(f));
    return out;
  }

  // Largest discrepancy between marginal distributions of the other parties
  // across one party's input choices, over all comparable stored rows.
  double no_signaling_defect() const {
    const int parties = scenario_.num_parties();
    double worst = 0.0;
    for (int p = 0; p < parties; ++p) {
      // key: input tuple with party p's input forced to 0.
      std::unordered_map<std::int64_t, std::vector<double>> seen;
      for (size_t f = 0; f < rows_.size(); ++f) {
        if (rows_[f].empty()) continue;
        const std::vector<int> inputs =
            scenario_.input_unflat(static_cast<std::int64_t>(f));
        std::vector<int> key_inputs = inputs;
        key_inputs[static_cast<size_t>(p)] = 0;
        const std::int64_t key = scenario_.input_flat(key_inputs);

        std::int64_t prefix = 1, suffix = 1;
        for (int q = 0; q < p; ++q)
          prefix *= scenario_.num_outcomes(q, inputs[static_cast<size_t>(q)]);
        for (int q = p + 1; q < parties; ++q)
          suffix *= scenario_.num_outcomes(q, inputs[static_cast<size_t>(q)]);
        const std::int64_t m =
            scenario_.num_outcomes(p, inputs[static_cast<size_t>(p)]);

        std::vector<double> marg(static_cast<size_t>(prefix * suffix), 0.0);
        const std::vector<double>& r = rows_[f];
        for (std::int64_t a = 0; a < prefix; ++a)
          for (std::int64_t o = 0; o < m; ++o)
            for (std::int64_t b = 0; b < suffix; ++b)
              marg[static_cast<size_t>(a * suffix + b)] +=
                  r[static_cast<size_t>((a * m + o) * suffix + b)];

        const auto it = seen.find(key);
        if (it == seen.end()) {
          seen.emplace(key, std::move(marg));
        } else {
          // Comparable rows always share the other parties' inputs, hence
          // marginal lengths.
          const std::vector<double>& ref = it->second;
          for (size_t k = 0; k < ref.size(); ++k)
            worst = std::max(worst, std::abs(ref[k] - marg[k]));
        }
      }
    }
    return worst;
  }

 private:
  Scenario scenario_;
  std::vector<std::vector<double>> rows_;
  std::int64_t present_ = 0;
};

// P(outcomes | inputs) for a single outcome tuple, straight from the state.
inline double born_probability(const PhysicalModel& m,
                               const std::vector<int>& inputs,
                               const std::vector<int>& outcomes) {
  const Scenario& sc = m.scenario;
  require(static_cast<int>(inputs.size()) == sc.num_parties() &&
              static_cast<int>(outcomes.size()) == sc.num_parties(),
          "need one input and one outcome per party");
  Vec v = m.global_state.amplitudes();
  for (int p = 0; p < sc.num_parties(); ++p) {
    const int x = inputs[static_cast<size_t>(p)];
    const int o = outcomes[static_cast<size_t>(p)];
    require(x >= 0 && x < sc.num_inputs(p), "input out of range");
    require(o >= 0 && o < sc.num_outcomes(p, x), "outcome out of range");
    const ProjectorSet& ps =
        m.measurements[static_cast<size_t>(p)][static_cast<size_t>(x)];
    v = detail::apply_op_vec(v, m.global_state.layout(),
                             m.party_sites[static_cast<size_t>(p)],
                             ps.projector(o));
  }
  return v.squaredNorm();
}

namespace detail {

// Precomputed embedding offsets of one party's sites: any flat state index
// splits uniquely as group[g] + rest[r].
struct PartyGeometry {
  std::vector<std::int64_t> group;
  std::vector<std::int64_t> rest;
};

inline std::vector<PartyGeometry> party_geometries(const PhysicalModel& m) {
  std::vector<PartyGeometry> geo;
  geo.reserve(m.party_sites.size());
  for (const auto& sites : m.party_sites) {
    PartyGeometry g;
    g.group = group_offsets(m.global_state.layout(), sites);
    g.rest = group_offsets(m.global_state.layout(),
                           complement_sites(m.global_state.layout(), sites));
    geo.push_back(std::move(g));
  }
  return geo;
}

class RowEvaluator {
 public:
  RowEvaluator(const PhysicalModel& m, const std::vector<PartyGeometry>& geo)
      : m_(m), geo_(geo), parties_(m.scenario.num_parties()) {}

  std::vector<double> run(const std::vector<int>& inputs) {
    inputs_ = &inputs;
    leaves_below_.assign(static_cast<size_t>(parties_) + 1, 1);
    for (int p = parties_; p-- > 0;)
      leaves_below_[static_cast<size_t>(p)] =
          leaves_below_[static_cast<size_t>(p + 1)] *
          m_.scenario.num_outcomes(p, inputs[static_cast<size_t>(p)]);
    std::vector<double> out(static_cast<size_t>(leaves_below_[0]), 0.0);
    out_ = &out;
    cursor_ = 0;
    descend(0, m_.global_state.amplitudes());
    return out;
  }

 private:
  // Branch weights below this are written as exact zeros without descending.
  static constexpr double kPrune = 1e-28;

  void descend(int p, const Vec& v) {
    const ProjectorSet& ps =
        m_.measurements[static_cast<size_t>(p)]
                       [static_cast<size_t>((*inputs_)[static_cast<size_t>(p)])];
    for (int o = 0; o < ps.size(); ++o) {
      Vec child = project(geo_[static_cast<size_t>(p)], ps.projector(o), v);
      const double w = child.squaredNorm();
      if (p + 1 == parties_) {
        (*out_)[static_cast<size_t>(cursor_++)] = w;
      } else if (w < kPrune) {
        cursor_ += leaves_below_[static_cast<size_t>(p + 1)];
      } else {
        descend(p + 1, child);
      }
    }
  }

  static Vec project(const PartyGeometry& g, const Mat& op, const Vec& v) {
    const auto gd = static_cast<std::int64_t>(g.group.size());
    Vec out(v.size()), in(gd), tmp(gd);
    for (const std::int64_t base : g.rest) {
      for (std::int64_t k = 0; k < gd; ++k)
        in(k) = v(base + g.group[static_cast<size_t>(k)]);
      tmp.noalias() = op * in;
      for (std::int64_t k = 0; k < gd; ++k)
        out(base + g.group[static_cast<size_t>(k)]) = tmp(k);
    }
    return out;
  }

  const PhysicalModel& m_;
  const std::vector<PartyGeometry>& geo_;
  int parties_;
  const std::vector<int>* inputs_ = nullptr;
  std::vector<double>* out_ = nullptr;
  std::vector<std::int64_t> leaves_below_;
  std::int64_t cursor_ = 0;
};

}  // namespace detail

// Evaluates the listed input rows of the model (duplicates collapse).
inline Behavior behavior_of(const PhysicalModel& m,
                            const std::vector<std::vector<int>>& row_inputs) {
  validate_model(m);
  std::vector<std::int64_t> flats;
  flats.reserve(row_inputs.size());
  for (const auto& in : row_inputs) flats.push_back(m.scenario.input_flat(in));
  std::sort(flats.begin(), flats.end());
  flats.erase(std::unique(flats.begin(), flats.end()), flats.end());

  const auto geo = detail::party_geometries(m);
  std::vector<std::vector<double>> results(flats.size());

  const int workers = static_cast<int>(std::min<std::int64_t>(
      thread_count(), static_cast<std::int64_t>(flats.size())));
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  auto body = [&](int t) {
    try {
      detail::RowEvaluator eval(m, geo);
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= flats.size()) break;
        results[i] = eval.run(m.scenario.input_unflat(flats[i]));
      }
    } catch (...) {
      errors[static_cast<size_t>(t)] = std::current_exception();
    }
  };
  if (workers <= 1) {
    if (!flats.empty()) body(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(body, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Behavior b(m.scenario);
  for (size_t i = 0; i < flats.size(); ++i)
    b.set_row(m.scenario.input_unflat(flats[i]), std::move(results[i]));
  return b;
}

// Every input row.
inline Behavior behavior_of(const PhysicalModel& m) {
  std::vector<std::vector<int>> rows;
  const std::int64_t total = m.scenario.num_input_tuples();
  rows.reserve(static_cast<size_t>(total));
  for (std::int64_t f = 0; f < total; ++f)
    rows.push_back(m.scenario.input_unflat(f));
  return behavior_of(m, rows);
}

inline Behavior reference_behavior(Variant variant, const PureState& psi) {
  return behavior_of(build_reference_model(variant, psi));
}

}  // namespace netcert
