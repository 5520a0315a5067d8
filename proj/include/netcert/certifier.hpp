#pragma once

// Certification of a behavior against the reference-correlation boxes: the
// per-pair 3-CHSH totals, the teleportation-tomography condition, and (fully
// networked variant) the Bell-pair alignment patterns of the two parallel
// Bell measurements.
//
// All residuals are max-abs over every checked entry, so a failure points at
// the single worst violation rather than an average.

#include <array>
#include <optional>
#include <vector>

#include "netcert/behavior.hpp"

namespace netcert {

struct Tolerance {
  double eps_chsh = 1e-9;
  double eps_tomo = 1e-9;
  double eps_align = 1e-9;
};

inline void validate_tolerance(const Tolerance& t) {
  require(t.eps_chsh >= 0.0 && t.eps_tomo >= 0.0 && t.eps_align >= 0.0,
          "tolerances must be nonnegative");
}

struct CertReport {
  Scenario scenario;
  std::vector<double> chsh_totals;  // per pair, canonical contexts
  double chsh_worst_deviation = 0.0;
  bool chsh_pass = false;
  double tomography_residual = 0.0;
  bool tomography_pass = false;
  double alignment_residual = 0.0;  // stays 0 for the network variant
  bool alignment_pass = false;
  bool pass = false;
};

namespace detail {

// The three CHSH blocks: main inputs (x1,x2) and the aux Pauli roles.
struct ChshBlock {
  int x1, x2;
  Pauli p1, p2;
};

inline ChshBlock chsh_block(int k) {
  require(k >= 1 && k <= 3, "CHSH block index must be 1, 2 or 3");
  static constexpr ChshBlock blocks[3] = {
      {0, 1, Pauli::Z, Pauli::X},
      {2, 3, Pauli::Z, Pauli::Y},
      {4, 5, Pauli::X, Pauli::Y},
  };
  return blocks[k - 1];
}

// Correlator <(-1)^(a_j + b)> from one stored row, marginalizing everything
// else. `aux_bit` extracts the relevant bit from the aux party's outcome.
template <class AuxBit>
double row_correlator(const Behavior& b, const std::vector<int>& inputs,
                      int main_party, int aux_party, AuxBit aux_bit) {
  const Scenario& sc = b.scenario();
  const std::vector<double>& r = b.row(inputs);
  double e = 0.0;
  for (std::int64_t f = 0; f < static_cast<std::int64_t>(r.size()); ++f) {
    const std::vector<int> outs = sc.outcome_unflat(inputs, f);
    const int a = outs[static_cast<size_t>(main_party)];
    const int bit = aux_bit(outs[static_cast<size_t>(aux_party)]);
    e += ((a ^ bit) & 1) ? -r[static_cast<size_t>(f)]
                         : r[static_cast<size_t>(f)];
  }
  return e;
}

// First present row (lowest flat index) with main party j at input x and the
// aux party at input ay; empty if the table has none.
inline std::optional<std::vector<int>> find_correlator_row(const Behavior& b,
                                                           int j, int x,
                                                           int aux_party,
                                                           int ay) {
  const Scenario& sc = b.scenario();
  for (std::int64_t f : b.present_rows()) {
    const std::vector<int> inputs = sc.input_unflat(f);
    if (inputs[static_cast<size_t>(j)] == x &&
        inputs[static_cast<size_t>(aux_party)] == ay)
      return inputs;
  }
  return std::nullopt;
}

}  // namespace detail

// One CHSH block for pair j in the network variant, read off the table.
inline double chsh_value(const Behavior& b, int j, int k) {
  const Scenario& sc = b.scenario();
  require(sc.variant() == Variant::Network,
          "the fully-networked variant needs explicit y-vector contexts");
  require(j >= 0 && j < sc.n(), "pair index out of range");
  const detail::ChshBlock blk = detail::chsh_block(k);
  const int aux = sc.n() + j;
  auto bit = [](int o) { return o; };
  auto term = [&](int x, Pauli p) {
    const auto row = detail::find_correlator_row(b, j, x, aux,
                                                 static_cast<int>(p));
    require(row.has_value(), "missing row for the 3-CHSH check");
    return detail::row_correlator(b, *row, j, aux, bit);
  };
  return term(blk.x1, blk.p1) + term(blk.x1, blk.p2) + term(blk.x2, blk.p1) -
         term(blk.x2, blk.p2);
}

// One CHSH block for pair j in the fully-networked variant. y1 and y2 are
// the full Pauli vectors used for the block's two aux roles; their j-th
// digits must equal the block's Paulis.
inline double chsh_value(const Behavior& b, int j, int k,
                         const std::vector<int>& y1,
                         const std::vector<int>& y2) {
  const Scenario& sc = b.scenario();
  require(sc.variant() == Variant::Fully,
          "y-vector contexts only apply to the fully-networked variant");
  require(j >= 0 && j < sc.n(), "pair index out of range");
  require(static_cast<int>(y1.size()) == sc.n() &&
              static_cast<int>(y2.size()) == sc.n(),
          "context vector length mismatch");
  const detail::ChshBlock blk = detail::chsh_block(k);
  require(y1[static_cast<size_t>(j)] == static_cast<int>(blk.p1) &&
              y2[static_cast<size_t>(j)] == static_cast<int>(blk.p2),
          "context vectors must measure the block's Paulis at coordinate j");
  const int aux = sc.n();
  const int n = sc.n();
  auto bit = [n, j](int o) { return (o >> (n - 1 - j)) & 1; };
  auto term = [&](int x, const std::vector<int>& y) {
    const auto row =
        detail::find_correlator_row(b, j, x, aux, sc.fully_vector_input(y));
    require(row.has_value(), "missing row for the 3-CHSH check");
    return detail::row_correlator(b, *row, j, aux, bit);
  };
  return term(blk.x1, y1) + term(blk.x1, y2) + term(blk.x2, y1) -
         term(blk.x2, y2);
}

struct ChshCheck {
  std::vector<double> totals;  // canonical context per pair
  double worst_deviation = 0.0;
};

// Per-pair 3-CHSH totals against 6*sqrt(2). The network variant reads one
// (no-signaling-equivalent) context per pair; the fully variant sweeps every
// context triple whose correlators the table contains.
inline ChshCheck check_3chsh(const Behavior& b) {
  const Scenario& sc = b.scenario();
  const int n = sc.n();
  ChshCheck out;

  if (sc.variant() == Variant::Network) {
    for (int j = 0; j < n; ++j) {
      const double total =
          chsh_value(b, j, 1) + chsh_value(b, j, 2) + chsh_value(b, j, 3);
      out.totals.push_back(total);
      out.worst_deviation =
          std::max(out.worst_deviation, std::abs(total - kSixSqrtTwo));
    }
    return out;
  }

  // Fully networked: collect, per pair and main input, the correlator for
  // every vector input present in the table, then enumerate context triples.
  const int aux = n;
  const std::int64_t vecs = ipow(3, n);
  for (int j = 0; j < n; ++j) {
    auto bit = [n, j](int o) { return (o >> (n - 1 - j)) & 1; };
    // corr[x][v] for the vector inputs we can evaluate.
    std::vector<std::vector<std::optional<double>>> corr(
        6, std::vector<std::optional<double>>(static_cast<size_t>(vecs)));
    for (std::int64_t f : b.present_rows()) {
      const std::vector<int> inputs = sc.input_unflat(f);
      const int x = inputs[static_cast<size_t>(j)];
      const int ay = inputs[static_cast<size_t>(aux)];
      if (x >= 6 || !sc.fully_input_is_vector(ay)) continue;
      if (corr[static_cast<size_t>(x)][static_cast<size_t>(ay)].has_value())
        continue;
      corr[static_cast<size_t>(x)][static_cast<size_t>(ay)] =
          detail::row_correlator(b, inputs, j, aux, bit);
    }

    // Vector inputs measuring Pauli p at coordinate j.
    std::array<std::vector<int>, 3> by_pauli;
    for (int v = 0; v < vecs; ++v)
      by_pauli[static_cast<size_t>(sc.fully_vector(v)[static_cast<size_t>(j)])]
          .push_back(v);

    auto block_value = [&](int k, int vy1, int vy2) -> std::optional<double> {
      const detail::ChshBlock blk = detail::chsh_block(k);
      const auto& c1 = corr[static_cast<size_t>(blk.x1)];
      const auto& c2 = corr[static_cast<size_t>(blk.x2)];
      if (!c1[static_cast<size_t>(vy1)] || !c1[static_cast<size_t>(vy2)] ||
          !c2[static_cast<size_t>(vy1)] || !c2[static_cast<size_t>(vy2)])
        return std::nullopt;
      return *c1[static_cast<size_t>(vy1)] + *c1[static_cast<size_t>(vy2)] +
             *c2[static_cast<size_t>(vy1)] - *c2[static_cast<size_t>(vy2)];
    };

    bool any = false;
    std::optional<double> canonical;
    for (int vz : by_pauli[0])
      for (int vx : by_pauli[1]) {
        const auto b1 = block_value(1, vz, vx);
        if (!b1) continue;
        for (int vy : by_pauli[2]) {
          const auto b2 = block_value(2, vz, vy);
          const auto b3 = block_value(3, vx, vy);
          if (!b2 || !b3) continue;
          const double total = *b1 + *b2 + *b3;
          if (!canonical) canonical = total;
          any = true;
          out.worst_deviation =
              std::max(out.worst_deviation, std::abs(total - kSixSqrtTwo));
        }
      }
    require(any, "missing row for the 3-CHSH check");
    out.totals.push_back(*canonical);
  }
  return out;
}

// Teleportation-tomography condition: for every Bell outcome tuple a and
// Pauli vector k, the table's signed sum over aux bits must equal
// (1/4^N) <psi| prod_j U_a_j^dag sigma_k_j U_a_j |psi>.
inline double check_tomography_condition(const Behavior& b,
                                         const PureState& psi) {
  const Scenario& sc = b.scenario();
  const int n = sc.n();
  require(psi.num_sites() == n, "target state size does not match scenario");
  for (int s = 0; s < n; ++s)
    require(psi.layout().dim(s) == 2, "target state must have qubit sites");
  require(psi.normalized(), "target state must be normalized");

  const std::int64_t bells = ipow(4, n);
  const std::int64_t paulis = ipow(3, n);
  const double scale = 1.0 / static_cast<double>(bells);

  double worst = 0.0;
  for (std::int64_t kv = 0; kv < paulis; ++kv) {
    // Decode the Pauli vector, coordinate 0 most significant.
    std::vector<int> k(static_cast<size_t>(n));
    std::int64_t rem = kv;
    for (int j = n; j-- > 0;) {
      k[static_cast<size_t>(j)] = static_cast<int>(rem % 3);
      rem /= 3;
    }

    std::vector<int> inputs(static_cast<size_t>(sc.num_parties()));
    for (int j = 0; j < n; ++j) inputs[static_cast<size_t>(j)] = Scenario::kMainBsm;
    if (sc.variant() == Variant::Network) {
      for (int j = 0; j < n; ++j)
        inputs[static_cast<size_t>(n + j)] = k[static_cast<size_t>(j)];
    } else {
      inputs[static_cast<size_t>(n)] = sc.fully_vector_input(k);
    }
    require(b.has_row(inputs), "missing all-Bell row for the tomography check");
    const std::vector<double>& row = b.row(inputs);

    // One pass accumulates the signed sums for every Bell tuple a.
    std::vector<double> lhs(static_cast<size_t>(bells), 0.0);
    for (std::int64_t f = 0; f < static_cast<std::int64_t>(row.size()); ++f) {
      const std::vector<int> outs = sc.outcome_unflat(inputs, f);
      std::int64_t a = 0;
      for (int j = 0; j < n; ++j) a = a * 4 + outs[static_cast<size_t>(j)];
      int parity = 0;
      if (sc.variant() == Variant::Network) {
        for (int j = 0; j < n; ++j)
          parity ^= outs[static_cast<size_t>(n + j)] & 1;
      } else {
        int ob = outs[static_cast<size_t>(n)];
        while (ob) {
          parity ^= ob & 1;
          ob >>= 1;
        }
      }
      lhs[static_cast<size_t>(a)] +=
          parity ? -row[static_cast<size_t>(f)] : row[static_cast<size_t>(f)];
    }

    for (std::int64_t a = 0; a < bells; ++a) {
      Mat op = Mat::Identity(1, 1);
      std::int64_t arem = a;
      std::vector<int> digits(static_cast<size_t>(n));
      for (int j = n; j-- > 0;) {
        digits[static_cast<size_t>(j)] = static_cast<int>(arem % 4);
        arem /= 4;
      }
      for (int j = 0; j < n; ++j) {
        const int aj = digits[static_cast<size_t>(j)];
        const Mat u = correction_unitary(aj >> 1, aj & 1).matrix();
        const Mat s =
            pauli_matrix(static_cast<Pauli>(k[static_cast<size_t>(j)]));
        op = Eigen::kroneckerProduct(op, Mat(u.adjoint() * s * u)).eval();
      }
      const double rhs =
          scale *
          (psi.amplitudes().adjoint() * op * psi.amplitudes())(0).real();
      worst = std::max(worst, std::abs(lhs[static_cast<size_t>(a)] - rhs));
    }
  }
  return worst;
}

// Bell-pair alignment of the fully-networked variant: for both parallel Bell
// measurements and every measured pair, each pair outcome must occur with
// weight 1/4 and the three diagonal correlator families must follow the
// (-1)-bit patterns of a shared Bell pair.
inline double check_alignment(const Behavior& b) {
  const Scenario& sc = b.scenario();
  require(sc.variant() == Variant::Fully,
          "alignment only applies to the fully-networked variant");
  const int n = sc.n();
  const int aux = n;
  double worst = 0.0;

  for (const int ay : {sc.fully_bsm_even_input(), sc.fully_bsm_odd_input()}) {
    const auto pairs = pairing_sites(sc.fully_pairing(ay), n);
    const int num_pairs = static_cast<int>(pairs.size());
    for (int pi = 0; pi < num_pairs; ++pi) {
      const auto [c1, c2] = pairs[static_cast<size_t>(pi)];
      auto digit_of = [num_pairs, pi](int o) {
        return (o >> (2 * (num_pairs - 1 - pi))) & 3;
      };

      // E[u][v][d]: signed main-pair correlator restricted to pair outcome d;
      // w[d]: plain weight of pair outcome d.
      auto correlators = [&](int u, int v, std::array<double, 4>& e,
                             std::array<double, 4>* w) {
        const auto row = [&]() -> std::optional<std::vector<int>> {
          for (std::int64_t f : b.present_rows()) {
            const std::vector<int> inputs = sc.input_unflat(f);
            if (inputs[static_cast<size_t>(aux)] == ay &&
                inputs[static_cast<size_t>(c1)] == u &&
                inputs[static_cast<size_t>(c2)] == v)
              return inputs;
          }
          return std::nullopt;
        }();
        require(row.has_value(), "missing row for the alignment check");
        const std::vector<double>& r = b.row(*row);
        e.fill(0.0);
        if (w) w->fill(0.0);
        for (std::int64_t f = 0; f < static_cast<std::int64_t>(r.size());
             ++f) {
          const std::vector<int> outs = sc.outcome_unflat(*row, f);
          const int d = digit_of(outs[static_cast<size_t>(aux)]);
          const int sign = (outs[static_cast<size_t>(c1)] ^
                            outs[static_cast<size_t>(c2)]) &
                           1;
          e[static_cast<size_t>(d)] +=
              sign ? -r[static_cast<size_t>(f)] : r[static_cast<size_t>(f)];
          if (w) (*w)[static_cast<size_t>(d)] += r[static_cast<size_t>(f)];
        }
      };

      std::array<std::array<std::array<double, 4>, 2>, 2> ezx{};
      std::array<double, 4> weight{};
      correlators(0, 0, ezx[0][0], &weight);
      correlators(0, 1, ezx[0][1], nullptr);
      correlators(1, 0, ezx[1][0], nullptr);
      correlators(1, 1, ezx[1][1], nullptr);
      std::array<std::array<std::array<double, 4>, 2>, 2> eyy{};
      correlators(2, 2, eyy[0][0], nullptr);
      correlators(2, 3, eyy[0][1], nullptr);
      correlators(3, 2, eyy[1][0], nullptr);
      correlators(3, 3, eyy[1][1], nullptr);

      for (int d = 0; d < 4; ++d) {
        const size_t sd = static_cast<size_t>(d);
        const int b1 = d >> 1, b2 = d & 1;
        const double zz =
            0.5 * (ezx[0][0][sd] + ezx[0][1][sd] + ezx[1][0][sd] +
                   ezx[1][1][sd]);
        const double xx =
            0.5 * (ezx[0][0][sd] - ezx[0][1][sd] - ezx[1][0][sd] +
                   ezx[1][1][sd]);
        const double yy =
            0.5 * (eyy[0][0][sd] - eyy[0][1][sd] - eyy[1][0][sd] +
                   eyy[1][1][sd]);
        worst = std::max(worst, std::abs(zz - 0.25 * (b1 ? -1.0 : 1.0)));
        worst = std::max(worst, std::abs(xx - 0.25 * (b2 ? -1.0 : 1.0)));
        worst = std::max(
            worst, std::abs(yy - 0.25 * (((b1 ^ b2) ^ 1) ? -1.0 : 1.0)));
        worst = std::max(worst, std::abs(weight[sd] - 0.25));
      }
    }
  }
  return worst;
}

// The input rows the certifier reads, with unused parties pinned to input 0.
// Feeding these to behavior_of yields a partial table that certify accepts.
inline std::vector<std::vector<int>> certification_rows(const Scenario& sc) {
  const int n = sc.n();
  std::vector<std::vector<int>> rows;
  std::vector<int> base(static_cast<size_t>(sc.num_parties()), 0);

  if (sc.variant() == Variant::Network) {
    for (int j = 0; j < n; ++j)
      for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 3; ++y) {
          std::vector<int> r = base;
          r[static_cast<size_t>(j)] = x;
          r[static_cast<size_t>(n + j)] = y;
          rows.push_back(std::move(r));
        }
    for (std::int64_t kv = 0; kv < ipow(3, n); ++kv) {
      std::vector<int> r(static_cast<size_t>(sc.num_parties()));
      for (int j = 0; j < n; ++j)
        r[static_cast<size_t>(j)] = Scenario::kMainBsm;
      std::int64_t rem = kv;
      for (int j = n; j-- > 0;) {
        r[static_cast<size_t>(n + j)] = static_cast<int>(rem % 3);
        rem /= 3;
      }
      rows.push_back(std::move(r));
    }
    return rows;
  }

  // Fully networked: CHSH rows for every vector input (the context sweep),
  // tomography rows, and the alignment rows for both pairings.
  const std::int64_t vecs = ipow(3, n);
  for (int j = 0; j < n; ++j)
    for (int x = 0; x < 6; ++x)
      for (std::int64_t v = 0; v < vecs; ++v) {
        std::vector<int> r = base;
        r[static_cast<size_t>(j)] = x;
        r[static_cast<size_t>(n)] = static_cast<int>(v);
        rows.push_back(std::move(r));
      }
  for (std::int64_t v = 0; v < vecs; ++v) {
    std::vector<int> r = base;
    for (int j = 0; j < n; ++j) r[static_cast<size_t>(j)] = Scenario::kMainBsm;
    r[static_cast<size_t>(n)] = static_cast<int>(v);
    rows.push_back(std::move(r));
  }
  for (const int ay : {sc.fully_bsm_even_input(), sc.fully_bsm_odd_input()}) {
    for (const auto& [c1, c2] : pairing_sites(sc.fully_pairing(ay), n)) {
      for (const auto& [u, v] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1},
                                {2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
        std::vector<int> r = base;
        r[static_cast<size_t>(c1)] = u;
        r[static_cast<size_t>(c2)] = v;
        r[static_cast<size_t>(n)] = ay;
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

// Aggregates the applicable checks for the behavior's variant.
inline CertReport certify(const Behavior& b, const PureState& psi,
                          const Tolerance& tolp = Tolerance{}) {
  validate_tolerance(tolp);
  const Scenario& sc = b.scenario();

  CertReport rep{sc, {}, 0.0, false, 0.0, false, 0.0, false, false};
  const ChshCheck chsh = check_3chsh(b);
  rep.chsh_totals = chsh.totals;
  rep.chsh_worst_deviation = chsh.worst_deviation;
  rep.chsh_pass = chsh.worst_deviation <= tolp.eps_chsh;

  rep.tomography_residual = check_tomography_condition(b, psi);
  rep.tomography_pass = rep.tomography_residual <= tolp.eps_tomo;

  if (sc.variant() == Variant::Fully) {
    rep.alignment_residual = check_alignment(b);
    rep.alignment_pass = rep.alignment_residual <= tolp.eps_align;
  } else {
    rep.alignment_pass = true;
  }

  rep.pass = rep.chsh_pass && rep.tomography_pass && rep.alignment_pass;
  return rep;
}

}  // namespace netcert
