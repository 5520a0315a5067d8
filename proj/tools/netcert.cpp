// Command-line front end: simulate reference behaviors, certify behavior
// tables, run the extraction channel against adversarial models, and list
// partial-transpose spectra.
//
// Exit codes: 0 success (and certification pass), 1 certification failure,
// 2 malformed input or usage error.

#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netcert/io.hpp"
#include "netcert/netcert.hpp"

namespace {

using namespace netcert;

Variant parse_variant(const std::string& s) {
  if (s == "network") return Variant::Network;
  if (s == "fully") return Variant::Fully;
  throw std::invalid_argument("variant must be \"network\" or \"fully\"");
}

PureState load_state(const std::string& path, bool encode_flag) {
  io::StateLoad ld = io::read_state_file(path);
  if (ld.renormalized)
    std::fprintf(stderr,
                 "warning: state norm deviated from one by %.3g; "
                 "amplitudes renormalized on load\n",
                 ld.norm_error);
  bool qubits_only = true;
  for (int s = 0; s < ld.state.num_sites(); ++s)
    if (ld.state.layout().dim(s) != 2) qubits_only = false;
  if (qubits_only) return ld.state;
  require(encode_flag,
          "state has non-qubit sites; rerun with --encode-qudit to map each "
          "site onto qubits");
  return encode_qudit(ld.state);
}

std::vector<int> parse_site_list(const std::string& text, int num_sites) {
  std::vector<int> sites;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    const std::string part = text.substr(pos, comma - pos);
    require(!part.empty() &&
                part.find_first_not_of("0123456789") == std::string::npos,
            "bipartition must be a comma-separated list of site indices");
    sites.push_back(std::stoi(part));
    pos = comma + 1;
  }
  const std::set<int> unique(sites.begin(), sites.end());
  require(unique.size() == sites.size(), "bipartition repeats a site");
  for (int s : sites)
    require(s >= 0 && s < num_sites, "bipartition site index out of range");
  require(static_cast<int>(sites.size()) < num_sites,
          "bipartition must leave at least one site on the other side");
  return sites;
}

std::string site_set_text(const std::vector<int>& sites) {
  std::string s = "{";
  for (size_t k = 0; k < sites.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(sites[k]);
  }
  return s + "}";
}

// --- simulate ---------------------------------------------------------------

int run_simulate(const std::string& state_path, const std::string& variant_name,
                 bool encode_flag, const std::string& out_path) {
  const PureState psi = load_state(state_path, encode_flag);
  const Variant variant = parse_variant(variant_name);
  const PhysicalModel m = build_reference_model(variant, psi);
  const Behavior b = behavior_of(m);
  io::write_behavior_file(out_path, b);
  std::printf("variant: %s, n = %d\n", variant_name.c_str(), m.scenario.n());
  std::printf("input rows: %lld\n",
              static_cast<long long>(b.num_rows_present()));
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

// --- certify ----------------------------------------------------------------

std::string certify_report_json(const CertReport& rep) {
  const Scenario& sc = rep.scenario;
  std::string s = "{\n  \"schema_version\": 1,\n  \"variant\": \"";
  s += sc.variant() == Variant::Network ? "network" : "fully";
  s += "\",\n  \"n\": " + std::to_string(sc.n());
  s += ",\n  \"chsh_totals\": [";
  for (size_t p = 0; p < rep.chsh_totals.size(); ++p) {
    if (p) s += ", ";
    s += io::format_double(rep.chsh_totals[p]);
  }
  s += "],\n  \"chsh_worst_deviation\": " +
       io::format_double(rep.chsh_worst_deviation);
  s += ",\n  \"chsh_pass\": " + std::string(rep.chsh_pass ? "true" : "false");
  s += ",\n  \"tomography_residual\": " +
       io::format_double(rep.tomography_residual);
  s += ",\n  \"tomography_pass\": " +
       std::string(rep.tomography_pass ? "true" : "false");
  s += ",\n  \"alignment_residual\": " +
       io::format_double(rep.alignment_residual);
  s += ",\n  \"alignment_pass\": " +
       std::string(rep.alignment_pass ? "true" : "false");
  s += ",\n  \"pass\": " + std::string(rep.pass ? "true" : "false");
  s += "\n}\n";
  return s;
}

int run_certify(const std::string& behavior_path, const std::string& state_path,
                bool encode_flag, const Tolerance& tolp,
                const std::string& out_path) {
  const Behavior b = io::read_behavior_file(behavior_path);
  const PureState psi = load_state(state_path, encode_flag);
  const CertReport rep = certify(b, psi, tolp);

  const Scenario& sc = rep.scenario;
  std::printf("variant: %s, n = %d\n",
              sc.variant() == Variant::Network ? "network" : "fully", sc.n());
  int worst_pair = 0;
  double worst_dev = 0.0;
  for (size_t p = 0; p < rep.chsh_totals.size(); ++p) {
    const double dev = std::abs(rep.chsh_totals[p] - kSixSqrtTwo);
    std::printf("pair %zu: 3-CHSH total = %s (deviation %.3g)\n", p,
                io::format_double(rep.chsh_totals[p]).c_str(), dev);
    if (dev > worst_dev) {
      worst_dev = dev;
      worst_pair = static_cast<int>(p);
    }
  }
  std::printf("3-CHSH check: %s (worst pair %d, deviation %.3g, tolerance %.3g)\n",
              rep.chsh_pass ? "PASS" : "FAIL", worst_pair,
              rep.chsh_worst_deviation, tolp.eps_chsh);
  std::printf("tomography check: %s (residual %.3g, tolerance %.3g)\n",
              rep.tomography_pass ? "PASS" : "FAIL", rep.tomography_residual,
              tolp.eps_tomo);
  if (sc.variant() == Variant::Fully)
    std::printf("alignment check: %s (residual %.3g, tolerance %.3g)\n",
                rep.alignment_pass ? "PASS" : "FAIL", rep.alignment_residual,
                tolp.eps_align);
  std::printf("certification: %s\n", rep.pass ? "PASS" : "FAIL");

  if (!out_path.empty())
    io::detail::write_text(out_path, certify_report_json(rep),
                           "certification report");
  return rep.pass ? 0 : 1;
}

// --- extract ----------------------------------------------------------------

AdversaryKind parse_kind(const std::string& name, double alpha,
                         std::uint64_t seed, double visibility, int pair) {
  if (name == "exact") return AdversaryKind::exact_reference();
  if (name == "conjugate") return AdversaryKind::global_conjugate();
  if (name == "flagged") return AdversaryKind::flagged_superposition(alpha);
  if (name == "embedded") return AdversaryKind::isometry_embedded(seed);
  if (name == "noisy") return AdversaryKind::noisy(visibility, pair);
  throw std::invalid_argument(
      "kind must be one of exact, conjugate, flagged, embedded, noisy");
}

int run_extract(const std::string& kind_name, const std::string& state_path,
                const std::string& variant_name, bool encode_flag, double alpha,
                std::uint64_t seed, double visibility, int pair,
                const std::string& out_path) {
  const PureState psi = load_state(state_path, encode_flag);
  const Variant variant = parse_variant(variant_name);
  const AdversaryKind kind =
      parse_kind(kind_name, alpha, seed, visibility, pair);
  const PhysicalModel m = make_model(kind, psi, variant);
  const ExtractionResult res = extraction_channel(m, psi);
  const double a = std::min(1.0, std::max(0.0, res.alpha));
  const double fid = family_fidelity(res.extracted, psi, a);

  std::printf("kind: %s, variant: %s, n = %d\n", kind_name.c_str(),
              variant_name.c_str(), psi.num_sites());
  std::printf("alpha = %s\n", io::format_double(res.alpha).c_str());
  std::printf("family fidelity = %s\n", io::format_double(fid).c_str());
  std::printf("residual outside flag sectors = %.3g\n", res.residual);
  std::printf("trace defect = %.3g\n", res.trace_defect);
  std::printf("flag sectors: %s\n", res.flag_pattern.c_str());

  if (!out_path.empty()) {
    std::string s = "{\n  \"schema_version\": 1,\n  \"kind\": \"" + kind_name;
    s += "\",\n  \"variant\": \"" + variant_name;
    s += "\",\n  \"alpha\": " + io::format_double(res.alpha);
    s += ",\n  \"family_fidelity\": " + io::format_double(fid);
    s += ",\n  \"residual\": " + io::format_double(res.residual);
    s += ",\n  \"trace_defect\": " + io::format_double(res.trace_defect);
    s += ",\n  \"flag_sectors\": \"" + res.flag_pattern + "\"\n}\n";
    io::detail::write_text(out_path, s, "extraction report");
  }
  return 0;
}

// --- pt ---------------------------------------------------------------------

int run_pt(const std::string& state_path, const std::string& bipartition) {
  io::StateLoad ld = io::read_state_file(state_path);
  if (ld.renormalized)
    std::fprintf(stderr,
                 "warning: state norm deviated from one by %.3g; "
                 "amplitudes renormalized on load\n",
                 ld.norm_error);
  const PureState& psi = ld.state;
  const std::vector<int> sites =
      parse_site_list(bipartition, psi.num_sites());

  std::vector<int> rest;
  {
    const std::set<int> chosen(sites.begin(), sites.end());
    for (int s = 0; s < psi.num_sites(); ++s)
      if (!chosen.count(s)) rest.push_back(s);
  }
  std::printf("partial transpose across %s | %s\n",
              site_set_text(sites).c_str(), site_set_text(rest).c_str());

  const SchmidtDecomposition sd = schmidt_decompose(psi, sites);
  std::vector<double> lambda(sd.coefficients.data(),
                             sd.coefficients.data() + sd.coefficients.size());
  const PTSpectrum spectrum = pt_spectrum_pure(lambda);

  std::printf("spectrum (%zu values):\n", spectrum.entries.size());
  double sum = 0.0;
  for (const PtEigenvalue& e : spectrum.entries) {
    std::printf("  %s\n", io::format_double(e.value).c_str());
    sum += e.value;
  }
  std::printf("sum = %s\n", io::format_double(sum).c_str());

  const PtBounds bounds = pt_bounds_check(DensityOp::from_pure(psi), sites);
  std::printf("eigenvalue range = [%s, %s]\n",
              io::format_double(bounds.min_eig).c_str(),
              io::format_double(bounds.max_eig).c_str());
  std::printf("separable across this cut: %s\n",
              bounds.separable ? "yes" : "no");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "simulation and certification toolkit for network-assisted "
      "self-testing"};
  app.require_subcommand(1);

  std::string state_path, behavior_path, out_path, variant_name = "network";
  std::string kind_name, bipartition;
  bool encode_flag = false;
  double alpha = 1.0, visibility = 1.0;
  std::uint64_t seed = 0;
  int pair = 0;
  Tolerance tolp;

  CLI::App* sim = app.add_subcommand(
      "simulate", "evaluate the full reference behavior of a target state");
  sim->add_option("--state", state_path, "target state file")->required();
  sim->add_option("--variant", variant_name, "network or fully");
  sim->add_flag("--encode-qudit", encode_flag,
                "map equal-dimension qudit sites onto qubit blocks");
  sim->add_option("--out", out_path, "behavior file to write")->required();

  CLI::App* cert = app.add_subcommand(
      "certify", "check a behavior table against a target state");
  cert->add_option("--behavior", behavior_path, "behavior file")->required();
  cert->add_option("--state", state_path, "target state file")->required();
  cert->add_flag("--encode-qudit", encode_flag,
                 "map equal-dimension qudit sites onto qubit blocks");
  cert->add_option("--tol-chsh", tolp.eps_chsh, "3-CHSH total tolerance");
  cert->add_option("--tol-tomo", tolp.eps_tomo, "tomography residual tolerance");
  cert->add_option("--tol-align", tolp.eps_align,
                   "alignment residual tolerance");
  cert->add_option("--out", out_path, "JSON report to write");

  CLI::App* ext = app.add_subcommand(
      "extract", "run the extraction channel on an adversarial model");
  ext->add_option("--kind", kind_name,
                  "exact, conjugate, flagged, embedded, or noisy")
      ->required();
  ext->add_option("--state", state_path, "target state file")->required();
  ext->add_option("--variant", variant_name, "network or fully");
  ext->add_flag("--encode-qudit", encode_flag,
                "map equal-dimension qudit sites onto qubit blocks");
  ext->add_option("--alpha", alpha, "flag weight for the flagged kind");
  ext->add_option("--seed", seed, "seed for the embedded kind");
  ext->add_option("--visibility", visibility, "visibility for the noisy kind");
  ext->add_option("--pair", pair, "degraded pair for the noisy kind");
  ext->add_option("--out", out_path, "JSON report to write");

  CLI::App* pt = app.add_subcommand(
      "pt", "partial-transpose spectrum of a pure state across a cut");
  pt->add_option("--state", state_path, "state file")->required();
  pt->add_option("--bipartition", bipartition,
                 "comma-separated site indices of one side")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed())
      return run_simulate(state_path, variant_name, encode_flag, out_path);
    if (cert->parsed())
      return run_certify(behavior_path, state_path, encode_flag, tolp,
                         out_path);
    if (ext->parsed())
      return run_extract(kind_name, state_path, variant_name, encode_flag,
                         alpha, seed, visibility, pair, out_path);
    if (pt->parsed()) return run_pt(state_path, bipartition);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
