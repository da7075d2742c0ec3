#pragma once
// The growth functions used by the norm definitions:
//   f(x) = log2(x + 1)  and its square root.
// Both are in the admissible class (f(1)=1, strictly increasing, f(x) <= x,
// submultiplicative); the square-root variant appears in chained-form
// functionals.

#include <cstdint>

#include "seqspace/scalar.hpp"

namespace seqspace {

enum class GrowthTag { f, sqrt_f };

double growth_eval(GrowthTag g, double x);
// Certified evaluation at a rational argument (x >= 1).
Enc growth_eval_enc(GrowthTag g, const Rational& x);
Value growth_eval_value(GrowthTag g, const Rational& x, EvalMode mode);

// f(m) for natural m, both precisions.
double f_of(std::uint64_t m);
Enc f_of_enc(std::uint64_t m);

// log f(m) = log log2(m+1), certified resp. mode-dependent.
Enc log_f_enc(std::uint64_t m);
Value log_f_value(std::uint64_t m, EvalMode mode);

}  // namespace seqspace
