#pragma once

// JSON file formats for states and behavior tables.
//
// Both formats carry an explicit schema_version. Reading goes through a JSON
// parser; writing is hand-rolled so the byte layout is fully determined by
// the data: fixed field order, rows in flat input order, outcome keys in flat
// outcome order, and every floating-point value printed with 17 significant
// digits. That makes write -> read -> write the identity on files and keeps
// repeated runs byte-identical regardless of thread count.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netcert/behavior.hpp"

namespace netcert::io {

// Shortest fixed precision that round-trips every binary64 value through
// decimal.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string read_text(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), std::string("cannot open ") + what + ": " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

inline void write_text(const std::string& path, const std::string& text,
                       const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  require(out.good(), std::string("cannot write ") + what + ": " + path);
}

inline nlohmann::json parse(const std::string& text, const char* what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), std::string(what) + " is not valid JSON");
  return j;
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key,
                                   const char* what) {
  require(j.is_object() && j.contains(key),
          std::string(what) + " is missing the \"" + key + "\" field");
  return j.at(key);
}

inline void check_schema(const nlohmann::json& j, const char* what) {
  const nlohmann::json& v = field(j, "schema_version", what);
  require(v.is_number_integer() && v.get<int>() == 1,
          std::string(what) + " has an unsupported schema version");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// State files: local dimensions plus amplitudes as [re, im] pairs, site 0
// most significant.

inline std::string state_file_text(const PureState& psi) {
  const SiteLayout& L = psi.layout();
  std::string s = "{\n  \"schema_version\": 1,\n  \"local_dims\": [";
  for (int k = 0; k < L.num_sites(); ++k) {
    if (k) s += ", ";
    s += std::to_string(L.dim(k));
  }
  s += "],\n  \"amplitudes\": [\n";
  for (std::int64_t f = 0; f < L.total_dim(); ++f) {
    const cdouble a = psi.amplitudes()(f);
    s += "    [" + format_double(a.real()) + ", " + format_double(a.imag()) +
         (f + 1 < L.total_dim() ? "],\n" : "]\n");
  }
  s += "  ]\n}\n";
  return s;
}

inline void write_state_file(const std::string& path, const PureState& psi) {
  detail::write_text(path, state_file_text(psi), "state file");
}

struct StateLoad {
  PureState state;
  // Norm deviated from one by more than the working precision and the
  // amplitudes were rescaled; norm_error is the deviation before rescaling.
  bool renormalized = false;
  double norm_error = 0.0;
};

inline StateLoad read_state_file(const std::string& path) {
  const nlohmann::json j =
      detail::parse(detail::read_text(path, "state file"), "state file");
  detail::check_schema(j, "state file");

  const nlohmann::json& jd = detail::field(j, "local_dims", "state file");
  require(jd.is_array() && !jd.empty(), "state file needs a local_dims list");
  std::vector<int> dims;
  for (const auto& d : jd) {
    require(d.is_number_integer() && d.get<int>() >= 2,
            "state file local dimensions must be integers of at least two");
    dims.push_back(d.get<int>());
  }
  const SiteLayout layout{std::move(dims)};

  const nlohmann::json& ja = detail::field(j, "amplitudes", "state file");
  require(ja.is_array() &&
              static_cast<std::int64_t>(ja.size()) == layout.total_dim(),
          "state file amplitude count does not match the dimension product");
  Vec v(layout.total_dim());
  for (std::int64_t f = 0; f < layout.total_dim(); ++f) {
    const auto& pair = ja.at(static_cast<size_t>(f));
    require(pair.is_array() && pair.size() == 2 && pair.at(0).is_number() &&
                pair.at(1).is_number(),
            "state file amplitudes must be [re, im] pairs");
    v(f) = cdouble(pair.at(0).get<double>(), pair.at(1).get<double>());
  }

  const double norm = v.norm();
  const double norm_error = std::abs(norm - 1.0);
  require(norm_error <= 1e-6, "state file norm is out of tolerance");
  const bool renormalized = norm_error > tol::norm;
  if (renormalized) v /= norm;
  return StateLoad{PureState(layout, std::move(v)), renormalized, norm_error};
}

// ---------------------------------------------------------------------------
// Behavior files: scenario descriptor plus one row per stored input tuple,
// outcomes keyed by comma-joined per-party outcome digits.

namespace detail {

inline std::string outcome_key(const std::vector<int>& outcomes) {
  std::string key;
  for (size_t p = 0; p < outcomes.size(); ++p) {
    if (p) key += ',';
    key += std::to_string(outcomes[p]);
  }
  return key;
}

inline std::vector<int> parse_outcome_key(const std::string& key) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos <= key.size()) {
    const size_t comma = std::min(key.find(',', pos), key.size());
    const std::string part = key.substr(pos, comma - pos);
    require(!part.empty() &&
                part.find_first_not_of("0123456789") == std::string::npos,
            "behavior file has a malformed outcome key");
    out.push_back(std::stoi(part));
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

inline std::string behavior_file_text(const Behavior& b) {
  const Scenario& sc = b.scenario();
  std::string s = "{\n  \"schema_version\": 1,\n  \"scenario\": {\"variant\": \"";
  s += sc.variant() == Variant::Network ? "network" : "fully";
  s += "\", \"n\": " + std::to_string(sc.n()) + "},\n  \"rows\": [\n";

  const std::vector<std::int64_t> present = b.present_rows();
  for (size_t r = 0; r < present.size(); ++r) {
    const std::vector<int> inputs = sc.input_unflat(present[r]);
    s += "    {\"inputs\": [";
    for (size_t p = 0; p < inputs.size(); ++p) {
      if (p) s += ", ";
      s += std::to_string(inputs[p]);
    }
    s += "], \"outcomes\": {";
    const std::vector<double>& row = b.row(inputs);
    for (std::int64_t o = 0; o < static_cast<std::int64_t>(row.size()); ++o) {
      if (o) s += ", ";
      s += '"' + detail::outcome_key(sc.outcome_unflat(inputs, o)) +
           "\": " + format_double(row[static_cast<size_t>(o)]);
    }
    s += r + 1 < present.size() ? "}},\n" : "}}\n";
  }
  s += "  ]\n}\n";
  return s;
}

inline void write_behavior_file(const std::string& path, const Behavior& b) {
  detail::write_text(path, behavior_file_text(b), "behavior file");
}

inline Behavior read_behavior_file(const std::string& path) {
  const nlohmann::json j =
      detail::parse(detail::read_text(path, "behavior file"), "behavior file");
  detail::check_schema(j, "behavior file");

  const nlohmann::json& jsc = detail::field(j, "scenario", "behavior file");
  const nlohmann::json& jv = detail::field(jsc, "variant", "behavior file");
  require(jv.is_string() &&
              (jv.get<std::string>() == "network" ||
               jv.get<std::string>() == "fully"),
          "behavior file variant must be \"network\" or \"fully\"");
  const nlohmann::json& jn = detail::field(jsc, "n", "behavior file");
  require(jn.is_number_integer() && jn.get<int>() >= 1,
          "behavior file party count must be a positive integer");
  const Scenario sc(jv.get<std::string>() == "network" ? Variant::Network
                                                       : Variant::Fully,
                    jn.get<int>());

  Behavior b(sc);
  const nlohmann::json& jrows = detail::field(j, "rows", "behavior file");
  require(jrows.is_array(), "behavior file rows must be a list");
  for (const auto& jrow : jrows) {
    const nlohmann::json& ji = detail::field(jrow, "inputs", "behavior file");
    require(ji.is_array(), "behavior file row inputs must be a list");
    std::vector<int> inputs;
    for (const auto& x : ji) {
      require(x.is_number_integer(), "behavior file inputs must be integers");
      inputs.push_back(x.get<int>());
    }
    const nlohmann::json& jo = detail::field(jrow, "outcomes", "behavior file");
    require(jo.is_object(), "behavior file row outcomes must be a map");
    std::vector<double> probs(
        static_cast<size_t>(sc.num_outcome_tuples(inputs)), 0.0);
    for (const auto& [key, val] : jo.items()) {
      require(val.is_number(), "behavior file probabilities must be numbers");
      const std::int64_t flat =
          sc.outcome_flat(inputs, detail::parse_outcome_key(key));
      probs[static_cast<size_t>(flat)] = val.get<double>();
    }
    b.set_row(inputs, std::move(probs));
  }
  return b;
}

}  // namespace netcert::io
