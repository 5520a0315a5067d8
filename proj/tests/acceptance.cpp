// End-to-end acceptance gate. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any line fails. The first
// argument is the path of the command-line binary (used by the determinism
// criterion).
//
// Tolerances are pinned here, next to the checks that consume them.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netcert/io.hpp"
#include "netcert/netcert.hpp"
#include "oracles.hpp"

using namespace netcert;

namespace {

constexpr double kTolChsh = 1e-9;      // criteria 1 and 8
constexpr double kTolTomo = 1e-9;      // criterion 2
constexpr double kTolAlign = 1e-9;     // criterion 3
constexpr double kTolAlpha = 1e-8;     // criteria 4 and 5
constexpr double kTolFidelity = 1e-8;  // criterion 4
constexpr double kTolBehavior = 1e-10; // criterion 6
constexpr double kTolSpectrum = 1e-10; // criterion 7
constexpr double kNegativeEig = -1e-10;  // criterion 7, "strictly negative"

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

PureState complex_pair() {
  Vec v = Vec::Zero(4);
  v(0) = 1.0 / std::numbers::sqrt2;
  v(3) = cdouble(0.0, 1.0 / std::numbers::sqrt2);
  return PureState(SiteLayout::qubits(2), std::move(v));
}

// --- criterion 1: maximal 3-CHSH violation on random targets ---------------

Outcome criterion_chsh() {
  double worst = 0.0;
  double n3_seconds = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const PureState psi =
          random_state(SiteLayout::qubits(n), 1000 * n + seed);
      const Scenario sc(Variant::Network, n);
      const Behavior b = behavior_of(build_reference_model(Variant::Network, psi),
                                     certification_rows(sc));
      const ChshCheck chsh = check_3chsh(b);
      for (double total : chsh.totals)
        worst = std::max(worst, std::abs(total - kSixSqrtTwo));
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (n == 3)
      n3_seconds = std::chrono::duration<double>(t1 - t0).count();
  }
  const bool pass = worst <= kTolChsh && n3_seconds < 60.0;
  return {pass, "every pair total within " + fmt(worst) +
                    " of 6*sqrt(2) for N in {1,2,3} x 5 random targets; "
                    "N=3 block took " +
                    fmt(n3_seconds) + " s"};
}

// --- criterion 2: teleportation-tomography condition vs an oracle ----------

Outcome criterion_tomography() {
  double worst_vs_oracle = 0.0;
  double worst_library = 0.0;
  for (int n = 1; n <= 3; ++n) {
    for (const PureState& psi :
         {ghz_state(n), random_state(SiteLayout::qubits(n), 77 + n)}) {
      // Only the rows with every main at the Bell measurement matter here.
      std::vector<std::vector<int>> rows;
      for (std::int64_t kv = 0; kv < ipow(3, n); ++kv) {
        std::vector<int> r(static_cast<size_t>(2 * n), 0);
        for (int j = 0; j < n; ++j)
          r[static_cast<size_t>(j)] = Scenario::kMainBsm;
        std::int64_t rem = kv;
        for (int j = n; j-- > 0;) {
          r[static_cast<size_t>(n + j)] = static_cast<int>(rem % 3);
          rem /= 3;
        }
        rows.push_back(std::move(r));
      }
      const PhysicalModel m = build_reference_model(Variant::Network, psi);
      const Behavior b = behavior_of(m, rows);
      worst_library =
          std::max(worst_library, check_tomography_condition(b, psi));

      // Signed aux sums straight off the table, one Bell tuple at a time,
      // against (1/4^N) <psi| prod_j U_a^dag sigma_k U_a |psi> built from
      // explicit two-by-two matrices.
      const double scale = 1.0 / static_cast<double>(ipow(4, n));
      for (const auto& inputs : rows) {
        const std::vector<double>& row = b.row(inputs);
        std::vector<double> lhs(static_cast<size_t>(ipow(4, n)), 0.0);
        for (std::int64_t f = 0; f < static_cast<std::int64_t>(row.size());
             ++f) {
          const std::vector<int> outs =
              b.scenario().outcome_unflat(inputs, f);
          std::int64_t a = 0;
          int parity = 0;
          for (int j = 0; j < n; ++j) {
            a = a * 4 + outs[static_cast<size_t>(j)];
            parity ^= outs[static_cast<size_t>(n + j)];
          }
          lhs[static_cast<size_t>(a)] +=
              parity ? -row[static_cast<size_t>(f)]
                     : row[static_cast<size_t>(f)];
        }
        for (std::int64_t a = 0; a < ipow(4, n); ++a) {
          std::vector<oracle::Mat> factors;
          std::int64_t arem = a;
          std::vector<int> adig(static_cast<size_t>(n));
          for (int j = n; j-- > 0;) {
            adig[static_cast<size_t>(j)] = static_cast<int>(arem % 4);
            arem /= 4;
          }
          for (int j = 0; j < n; ++j) {
            const int b1 = adig[static_cast<size_t>(j)] >> 1;
            const int b2 = adig[static_cast<size_t>(j)] & 1;
            oracle::Mat u = oracle::id2();
            if (b1) u = oracle::sigma_x() * u;
            if (b2) u = oracle::sigma_z() * u;
            const int k = inputs[static_cast<size_t>(n + j)];
            const oracle::Mat sig = k == 0   ? oracle::sigma_z()
                                    : k == 1 ? oracle::sigma_x()
                                             : oracle::sigma_y();
            factors.push_back(u.adjoint() * sig * u);
          }
          const oracle::Mat big = oracle::kron_chain(factors);
          const double rhs =
              (psi.amplitudes().adjoint() * big * psi.amplitudes())(0)
                  .real() *
              scale;
          worst_vs_oracle = std::max(
              worst_vs_oracle, std::abs(lhs[static_cast<size_t>(a)] - rhs));
        }
      }
    }
  }
  const bool pass = worst_vs_oracle <= kTolTomo && worst_library <= kTolTomo;
  return {pass, "max |table - oracle| = " + fmt(worst_vs_oracle) +
                    ", library residual = " + fmt(worst_library) +
                    " over all (a,k), N <= 3"};
}

// --- criterion 3: Bell-pair alignment in the fully networked variant -------

Outcome criterion_alignment() {
  double worst = 0.0;
  for (int n = 2; n <= 4; ++n) {
    const Scenario sc(Variant::Fully, n);
    std::vector<PureState> targets;
    targets.push_back(random_state(SiteLayout::qubits(n), 300 + n));
    if (n < 4) targets.push_back(ghz_state(n));
    for (const PureState& psi : targets) {
      std::vector<std::vector<int>> rows;
      for (const auto& r : certification_rows(sc))
        if (r[static_cast<size_t>(n)] >= ipow(3, n)) rows.push_back(r);
      const Behavior b =
          behavior_of(build_reference_model(Variant::Fully, psi), rows);
      worst = std::max(worst, check_alignment(b));
    }
  }
  return {worst <= kTolAlign,
          "all pair weights and signed correlators within " + fmt(worst) +
              " of the +-1/4 patterns for N in {2,3,4}"};
}

// --- criteria 4 and 5: extraction across the adversary families ------------

struct ExtractionCase {
  std::string label;
  AdversaryKind kind;
  double expected_alpha;  // negative means "either 0 or 1"
};

Outcome criterion_extraction_network() {
  const std::vector<ExtractionCase> cases = {
      {"exact", AdversaryKind::exact_reference(), 1.0},
      {"conjugate", AdversaryKind::global_conjugate(), 0.0},
      {"flagged(0)", AdversaryKind::flagged_superposition(0.0), 0.0},
      {"flagged(0.3)", AdversaryKind::flagged_superposition(0.3), 0.3},
      {"flagged(0.7)", AdversaryKind::flagged_superposition(0.7), 0.7},
      {"flagged(1)", AdversaryKind::flagged_superposition(1.0), 1.0},
      {"embedded(1)", AdversaryKind::isometry_embedded(1), 1.0},
      {"embedded(2)", AdversaryKind::isometry_embedded(2), 1.0},
      {"embedded(3)", AdversaryKind::isometry_embedded(3), 1.0},
  };
  double worst_alpha = 0.0, worst_fid = 0.0;
  std::string worst_case = "-";
  for (const auto& [name, psi] :
       std::vector<std::pair<std::string, PureState>>{
           {"GHZ_3", ghz_state(3)},
           {"W_3", w_state(3)},
           {"pair", complex_pair()}}) {
    for (const ExtractionCase& c : cases) {
      const PhysicalModel m = make_model(c.kind, psi, Variant::Network);
      const ExtractionResult res = extraction_channel(m, psi);
      // A real target makes conjugation invisible except through the flags:
      // the family member the channel lands on is the one its own flags name.
      const double a = std::min(1.0, std::max(0.0, res.alpha));
      const double fid = family_fidelity(res.extracted, psi, a);
      const double alpha_err = std::abs(res.alpha - c.expected_alpha);
      const double fid_err = 1.0 - fid;
      if (std::max(alpha_err, fid_err) >
          std::max(worst_alpha, worst_fid))
        worst_case = name + "/" + c.label;
      worst_alpha = std::max(worst_alpha, alpha_err);
      worst_fid = std::max(worst_fid, fid_err);
    }
  }
  const bool pass = worst_alpha <= kTolAlpha && worst_fid <= kTolFidelity;
  return {pass, "27 realizations: alpha recovered within " + fmt(worst_alpha) +
                    ", family fidelity >= 1 - " + fmt(worst_fid) +
                    " (worst: " + worst_case + ")"};
}

Outcome criterion_extraction_fully() {
  const std::vector<ExtractionCase> cases = {
      {"exact", AdversaryKind::exact_reference(), -1.0},
      {"conjugate", AdversaryKind::global_conjugate(), -1.0},
      {"embedded(1)", AdversaryKind::isometry_embedded(1), -1.0},
      {"embedded(2)", AdversaryKind::isometry_embedded(2), -1.0},
      {"embedded(3)", AdversaryKind::isometry_embedded(3), -1.0},
  };
  double worst = 0.0;
  for (const PureState& psi :
       {complex_pair(), ghz_state(2), ghz_state(3)}) {
    for (const ExtractionCase& c : cases) {
      const PhysicalModel m = make_model(c.kind, psi, Variant::Fully);
      const ExtractionResult res = extraction_channel(m, psi);
      worst = std::max(worst,
                       std::min(std::abs(res.alpha), std::abs(res.alpha - 1.0)));
    }
  }

  bool rejected = false;
  std::string message = "(not rejected)";
  try {
    make_model(AdversaryKind::flagged_superposition(0.5), ghz_state(2),
               Variant::Fully);
  } catch (const std::exception& e) {
    rejected = true;
    message = e.what();
  }
  const bool pass = worst <= kTolAlpha && rejected;
  return {pass, "independent-source realizations land on alpha in {0,1} "
                "within " +
                    fmt(worst) + "; flag superposition rejected (\"" +
                    message + "\")"};
}

// --- criterion 6: flag-weight independence of the behavior -----------------

Outcome criterion_alpha_independence() {
  double worst = 0.0;
  for (const PureState& psi : {complex_pair(), ghz_state(2)}) {
    const PhysicalModel reference =
        make_model(AdversaryKind::exact_reference(), psi, Variant::Network);
    std::vector<PhysicalModel> models;
    for (double alpha : {0.0, 0.3, 1.0})
      models.push_back(make_model(
          AdversaryKind::flagged_superposition(alpha), psi, Variant::Network));
    for (size_t i = 0; i < models.size(); ++i)
      for (size_t j = i + 1; j < models.size(); ++j)
        worst = std::max(worst, behavior_equivalence(models[i], models[j]));
    worst = std::max(worst, behavior_equivalence(models[0], reference));
  }
  return {worst <= kTolBehavior,
          "flagged behaviors for alpha in {0, 0.3, 1} agree entrywise "
          "within " +
              fmt(worst) + " (and match the reference)"};
}

// --- criterion 7: partial-transpose oracle equivalence ----------------------

Outcome criterion_pt_oracle() {
  // Closed-form spectrum against brute-force eigendecomposition.
  double worst_spec = 0.0;
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 4;
    std::vector<double> lam(static_cast<size_t>(m));
    double sq = 0.0;
    for (double& l : lam) {
      l = uni(rng);
      sq += l * l;
    }
    for (double& l : lam) l /= std::sqrt(sq);

    oracle::Mat rho = oracle::Mat::Zero(m * m, m * m);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        rho(i * m + i, k * m + k) =
            lam[static_cast<size_t>(i)] * lam[static_cast<size_t>(k)];
    const oracle::Mat pt = oracle::partial_transpose(rho, {m, m}, {1});
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(pt, Eigen::EigenvaluesOnly);
    std::vector<double> brute(es.eigenvalues().data(),
                              es.eigenvalues().data() + m * m);
    std::sort(brute.rbegin(), brute.rend());

    std::vector<double> closed = pt_spectrum_pure(lam).values();
    std::sort(closed.rbegin(), closed.rend());
    for (size_t k = 0; k < brute.size(); ++k)
      worst_spec = std::max(worst_spec, std::abs(brute[k] - closed[k]));
  }

  // Eigenvalue range over random mixed states and cuts.
  double lo = 0.0, hi = 1.0;
  const std::vector<std::vector<int>> layouts = {
      {2, 2}, {2, 3}, {3, 2}, {2, 2, 2}};
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const std::vector<int>& dims = layouts[trial % layouts.size()];
    const SiteLayout layout{std::vector<int>(dims)};
    const DensityOp rho = random_density(layout, 5000 + trial);
    const int sites = layout.num_sites();
    std::vector<std::vector<int>> subsets;
    for (int mask = 1; mask + 1 < (1 << sites); ++mask) {
      std::vector<int> sub;
      for (int s = 0; s < sites; ++s)
        if ((mask >> s) & 1) sub.push_back(s);
      subsets.push_back(std::move(sub));
    }
    const PtBounds pb =
        pt_bounds_check(rho, subsets[trial % subsets.size()]);
    lo = std::min(lo, pb.min_eig);
    hi = std::max(hi, pb.max_eig);
  }

  // Mixed conjugation flags on genuinely entangled targets must break
  // positivity.
  double worst_neg = -1.0;
  for (const PureState& psi :
       {ghz_state(2), ghz_state(3), w_state(3)}) {
    require(gme_check(psi), "flag-mixture target must be genuinely entangled");
    const int n = psi.num_sites();
    const std::int64_t patterns = std::int64_t{1} << n;
    for (std::int64_t a = 1; a + 1 < patterns; ++a) {
      std::vector<double> weights(static_cast<size_t>(patterns), 0.0);
      weights[0] = 0.5;
      weights[static_cast<size_t>(a)] = 0.5;
      const DensityOp rho = flagged_mixture(weights, psi);
      Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix(),
                                            Eigen::EigenvaluesOnly);
      worst_neg = std::max(worst_neg, es.eigenvalues().minCoeff());
    }
  }

  const bool pass = worst_spec <= kTolSpectrum && lo >= -0.5 - 1e-10 &&
                    hi <= 1.0 + 1e-10 && worst_neg < kNegativeEig;
  return {pass, "closed-form spectra within " + fmt(worst_spec) +
                    " of brute force; eigenvalue range [" + fmt(lo) + ", " +
                    fmt(hi) + "]; mixed-flag minimum eigenvalue <= " +
                    fmt(worst_neg)};
}

// --- criterion 8: negative controls -----------------------------------------

Outcome criterion_negative_controls() {
  const PureState ghz2 = ghz_state(2);
  const Scenario sc(Variant::Network, 2);

  const Behavior noisy = behavior_of(
      make_model(AdversaryKind::noisy(0.9, 1), ghz2, Variant::Network),
      certification_rows(sc));
  const CertReport noisy_rep = certify(noisy, ghz2);
  const double pair1_err =
      std::abs(noisy_rep.chsh_totals[1] - 0.9 * kSixSqrtTwo);
  const bool noisy_ok = !noisy_rep.pass && !noisy_rep.chsh_pass &&
                        pair1_err <= kTolChsh;

  const Behavior reference = behavior_of(
      build_reference_model(Variant::Network, ghz2), certification_rows(sc));
  const CertReport wrong_rep = certify(reference, w_state(2));
  const bool wrong_ok = !wrong_rep.pass && wrong_rep.chsh_pass &&
                        !wrong_rep.tomography_pass;

  return {noisy_ok && wrong_ok,
          "visibility 0.9 fails with pair-1 total = 0.9 * 6*sqrt(2) within " +
              fmt(pair1_err) + "; wrong target fails tomography (residual " +
              fmt(wrong_rep.tomography_residual) + ")"};
}

// --- criterion 9: byte-identical simulation across thread counts -----------

Outcome criterion_determinism(const std::string& cli) {
  if (cli.empty())
    return {false, "command-line binary path not provided"};
  const std::string dir = "/tmp/netcert_acceptance_" + std::to_string(getpid());
  if (std::system(("mkdir -p " + dir).c_str()) != 0)
    return {false, "cannot create scratch directory"};
  io::write_state_file(dir + "/ghz3.json", ghz_state(3));

  auto simulate = [&](const char* threads, const std::string& out) {
    const std::string cmd = std::string("NETCERT_THREADS=") + threads + " " +
                            cli + " simulate --state " + dir +
                            "/ghz3.json --out " + out + " >" + dir +
                            "/log.txt 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
  };
  if (!simulate("1", dir + "/t1.json") || !simulate("8", dir + "/t8.json"))
    return {false, "simulate run failed"};

  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
  };
  const std::string a = slurp(dir + "/t1.json"), b = slurp(dir + "/t8.json");
  const bool pass = !a.empty() && a == b;
  return {pass, "GHZ_3 table (" + std::to_string(a.size()) +
                    " bytes) byte-identical for 1 and 8 workers"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> gates = {
      {"maximal 3-CHSH totals", criterion_chsh},
      {"teleportation tomography", criterion_tomography},
      {"Bell-pair alignment", criterion_alignment},
      {"extraction, network variant", criterion_extraction_network},
      {"extraction, fully networked", criterion_extraction_fully},
      {"flag-weight independence", criterion_alpha_independence},
      {"partial-transpose oracle", criterion_pt_oracle},
      {"negative controls", criterion_negative_controls},
      {"simulation determinism", [&] { return criterion_determinism(cli); }},
  };

  int failures = 0;
  for (size_t k = 0; k < gates.size(); ++k) {
    Outcome out;
    try {
      out = gates[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("criterion %zu (%s): %s — %s\n", k + 1,
                gates[k].first.c_str(), out.pass ? "PASS" : "FAIL",
                out.detail.c_str());
    std::fflush(stdout);
  }
  if (failures)
    std::printf("%d of 9 criteria failed\n", failures);
  else
    std::printf("all 9 criteria passed\n");
  return failures == 0 ? 0 : 1;
}
