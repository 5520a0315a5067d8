#pragma once

// Scenario: the input/outcome alphabets of the two experiment variants.
//
// Network variant, N main parties: parties 0..N-1 are main (inputs "0".."5"
// plus the Bell measurement "bsm"), parties N..2N-1 are auxiliaries with
// Pauli inputs "0","1","2" (Z, X, Y).
//
// Fully-networked variant: parties 0..N-1 main as above, party N is the
// single auxiliary with 3^N vector inputs (a base-3 digit string, digit j
// selecting the Pauli for coordinate j) plus the two parallel Bell
// measurements "bsm_even" and "bsm_odd".

#include <string>

#include "netcert/common.hpp"
#include "netcert/gates.hpp"

namespace netcert {

enum class Variant { Network, Fully };

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

class Scenario {
 public:
  Scenario(Variant variant, int n) : variant_(variant), n_(n) {
    require(n_ >= 1, "scenario needs at least one main party");
    if (variant_ == Variant::Fully)
      require(n_ >= 2, "fully-networked scenario needs at least two parties");
  }

  Variant variant() const { return variant_; }
  int n() const { return n_; }

  int num_parties() const {
    return variant_ == Variant::Network ? 2 * n_ : n_ + 1;
  }
  bool is_main(int party) const { return party < n_; }

  int num_inputs(int party) const {
    check_party(party);
    if (is_main(party)) return 7;
    if (variant_ == Variant::Network) return 3;
    return static_cast<int>(ipow(3, n_)) + 2;
  }

  // Main input index of the Bell measurement.
  static constexpr int kMainBsm = 6;

  bool fully_input_is_vector(int input) const {
    return input < ipow(3, n_);
  }
  int fully_bsm_even_input() const { return static_cast<int>(ipow(3, n_)); }
  int fully_bsm_odd_input() const { return fully_bsm_even_input() + 1; }

  Pairing fully_pairing(int input) const {
    require(!fully_input_is_vector(input), "input is not a pairing input");
    return input == fully_bsm_even_input() ? Pairing::Even : Pairing::Odd;
  }

  // Base-3 digits of a vector input, coordinate 0 most significant.
  std::vector<int> fully_vector(int input) const {
    std::vector<int> y(static_cast<size_t>(n_));
    for (int j = n_; j-- > 0;) {
      y[static_cast<size_t>(j)] = static_cast<int>(input % 3);
      input /= 3;
    }
    return y;
  }

  int fully_vector_input(const std::vector<int>& y) const {
    require(static_cast<int>(y.size()) == n_, "vector input length mismatch");
    int idx = 0;
    for (int d : y) {
      require(d >= 0 && d < 3, "vector input digits must be 0..2");
      idx = idx * 3 + d;
    }
    return idx;
  }

  int num_outcomes(int party, int input) const {
    check_party(party);
    require(input >= 0 && input < num_inputs(party), "input out of range");
    if (is_main(party)) return input == kMainBsm ? 4 : 2;
    if (variant_ == Variant::Network) return 2;
    if (fully_input_is_vector(input)) return static_cast<int>(ipow(2, n_));
    return static_cast<int>(ipow(4, n_ / 2));
  }

  // ---- labels ------------------------------------------------------------

  std::string input_label(int party, int input) const {
    require(input >= 0 && input < num_inputs(party), "input out of range");
    if (is_main(party))
      return input == kMainBsm ? "bsm" : std::string(1, char('0' + input));
    if (variant_ == Variant::Network)
      return std::string(1, char('0' + input));
    if (fully_input_is_vector(input)) {
      std::string s;
      for (int d : fully_vector(input)) s += char('0' + d);
      return s;
    }
    return input == fully_bsm_even_input() ? "bsm_even" : "bsm_odd";
  }

  std::string outcome_label(int party, int input, int outcome) const {
    require(outcome >= 0 && outcome < num_outcomes(party, input),
            "outcome out of range");
    if (is_main(party)) {
      if (input != kMainBsm) return std::string(1, char('0' + outcome));
      return std::string() + char('0' + (outcome >> 1)) +
             char('0' + (outcome & 1));
    }
    if (variant_ == Variant::Network)
      return std::string(1, char('0' + outcome));
    if (fully_input_is_vector(input)) {
      // Coordinate 0 is the most significant bit of the outcome index.
      std::string s;
      for (int j = n_; j-- > 0;) s += char('0' + ((outcome >> j) & 1));
      return s;
    }
    // Parallel Bell measurement: base-4 digits, one two-bit group per pair.
    const int pairs = n_ / 2;
    std::vector<int> digit(static_cast<size_t>(pairs));
    int rem = outcome;
    for (int k = pairs; k-- > 0;) {
      digit[static_cast<size_t>(k)] = rem % 4;
      rem /= 4;
    }
    std::string s;
    for (int k = 0; k < pairs; ++k) {
      if (k) s += ',';
      s += char('0' + (digit[static_cast<size_t>(k)] >> 1));
      s += char('0' + (digit[static_cast<size_t>(k)] & 1));
    }
    return s;
  }

  int parse_input(int party, const std::string& label) const {
    for (int i = 0; i < num_inputs(party); ++i)
      if (input_label(party, i) == label) return i;
    fail("unknown input label: " + label);
  }

  int parse_outcome(int party, int input, const std::string& label) const {
    for (int o = 0; o < num_outcomes(party, input); ++o)
      if (outcome_label(party, input, o) == label) return o;
    fail("unknown outcome label: " + label);
  }

  // ---- tuple indexing ----------------------------------------------------

  std::int64_t num_input_tuples() const {
    std::int64_t t = 1;
    for (int p = 0; p < num_parties(); ++p) t *= num_inputs(p);
    return t;
  }

  std::int64_t input_flat(const std::vector<int>& inputs) const {
    require(static_cast<int>(inputs.size()) == num_parties(),
            "input tuple length mismatch");
    std::int64_t f = 0;
    for (int p = 0; p < num_parties(); ++p) {
      require(inputs[static_cast<size_t>(p)] >= 0 &&
                  inputs[static_cast<size_t>(p)] < num_inputs(p),
              "input out of range");
      f = f * num_inputs(p) + inputs[static_cast<size_t>(p)];
    }
    return f;
  }

  std::vector<int> input_unflat(std::int64_t f) const {
    std::vector<int> inputs(static_cast<size_t>(num_parties()));
    for (int p = num_parties(); p-- > 0;) {
      inputs[static_cast<size_t>(p)] = static_cast<int>(f % num_inputs(p));
      f /= num_inputs(p);
    }
    return inputs;
  }

  std::int64_t num_outcome_tuples(const std::vector<int>& inputs) const {
    std::int64_t t = 1;
    for (int p = 0; p < num_parties(); ++p)
      t *= num_outcomes(p, inputs[static_cast<size_t>(p)]);
    return t;
  }

  std::int64_t outcome_flat(const std::vector<int>& inputs,
                            const std::vector<int>& outcomes) const {
    std::int64_t f = 0;
    for (int p = 0; p < num_parties(); ++p)
      f = f * num_outcomes(p, inputs[static_cast<size_t>(p)]) +
          outcomes[static_cast<size_t>(p)];
    return f;
  }

  std::vector<int> outcome_unflat(const std::vector<int>& inputs,
                                  std::int64_t f) const {
    std::vector<int> outcomes(static_cast<size_t>(num_parties()));
    for (int p = num_parties(); p-- > 0;) {
      const int m = num_outcomes(p, inputs[static_cast<size_t>(p)]);
      outcomes[static_cast<size_t>(p)] = static_cast<int>(f % m);
      f /= m;
    }
    return outcomes;
  }

  bool operator==(const Scenario& o) const {
    return variant_ == o.variant_ && n_ == o.n_;
  }
  bool operator!=(const Scenario& o) const { return !(*this == o); }

 private:
  void check_party(int party) const {
    require(party >= 0 && party < num_parties(), "party index out of range");
  }

  Variant variant_;
  int n_;
};

}  // namespace netcert
