#pragma once
// Parameter families for the implicitly defined space: an increasing list of
// square naturals split into two interleaved pools (odd positions drive the
// chained-functional lengths, even positions receive the sigma coding), plus
// the growth exponents that gate admissible constructions.
//
// Toy mode carries the list explicitly and replaces the doubly exponential
// growth requirements with configured small exponents. Paper mode never
// materializes the values: members are p_k = 2^(2 a_k) for a symbolic integer
// exponent family, and the defining inequalities are verified symbolically.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqspace/scalar.hpp"

#include <json.hpp>

namespace seqspace {

// lhs >= 2^e decided exactly for rational lhs > 0 and rational e.
bool geq_pow2(const Rational& lhs, const Rational& e);

struct ParamSet {
  enum class Mode { toy, paper };
  Mode mode = Mode::toy;

  // Toy fields.
  std::vector<std::uint64_t> p;  // strictly increasing squares
  Rational sigma_exponent = Rational(1, 1024);
  Rational ris_exponent = Rational(1, 16);

  // Paper fields: p_k = 2^(2 a_k) with a_k = 128 k^2 + k, validated for
  // k = 1..paper_depth.
  std::uint64_t paper_depth = 64;

  static ParamSet toy_default();
  static ParamSet paper_default();

  // Throws ParseError naming the offending field / index.
  void validate() const;

  bool is_toy() const { return mode == Mode::toy; }
  std::vector<std::uint64_t> p1() const;  // odd positions (1-based)
  std::vector<std::uint64_t> p2() const;  // even positions
  bool in_p1(std::uint64_t v) const;
  // k-th element of the full list (1-based); throws BudgetError when out of
  // range (toy) or not representable (paper).
  std::uint64_t p_at(std::size_t k) const;

  // Effective exponents: toy values, or the fixed ones (10, 36, 4) in paper
  // mode.
  Rational sigma_exp() const;
  Rational ris_exp_entry() const;  // first-element bound exponent
  Rational ris_exp_chain() const;  // successor bound exponent

  nlohmann::json to_json() const;
  static ParamSet from_json(const nlohmann::json& j);
  std::string stamp() const;  // one-line mode/exponent summary for reports
};

}  // namespace seqspace
