#include "seqspace/ffunc.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>

namespace seqspace {

double growth_eval(GrowthTag g, double x) {
  if (x < 1.0) throw std::domain_error("growth_eval: x < 1");
  double f = std::log2(x + 1.0);
  return g == GrowthTag::f ? f : std::sqrt(f);
}

Enc growth_eval_enc(GrowthTag g, const Rational& x) {
  if (x < 1) throw std::domain_error("growth_eval_enc: x < 1");
  Enc f = log2p1_enc(x);
  return g == GrowthTag::f ? f : enc_sqrt(f);
}

Value growth_eval_value(GrowthTag g, const Rational& x, EvalMode mode) {
  if (mode == EvalMode::exact) return Value(growth_eval_enc(g, x));
  return Value(growth_eval(g, x.get_d()));
}

double f_of(std::uint64_t m) { return std::log2(static_cast<double>(m) + 1.0); }

Enc f_of_enc(std::uint64_t m) { return log2p1_enc(Rational(static_cast<unsigned long>(m))); }

Enc log_f_enc(std::uint64_t m) {
  if (m < 1) throw std::domain_error("log_f_enc: m < 1");
  Enc out;
  mpfr_t t;
  mpfr_init2(t, 128);
  mpfr_set_ui(t, static_cast<unsigned long>(m) + 1, MPFR_RNDD);
  mpfr_log2(t, t, MPFR_RNDD);
  mpfr_log(t, t, MPFR_RNDD);
  out.lo = mpfr_get_d(t, MPFR_RNDD);
  mpfr_set_ui(t, static_cast<unsigned long>(m) + 1, MPFR_RNDU);
  mpfr_log2(t, t, MPFR_RNDU);
  mpfr_log(t, t, MPFR_RNDU);
  out.hi = mpfr_get_d(t, MPFR_RNDU);
  mpfr_clear(t);
  return out;
}

Value log_f_value(std::uint64_t m, EvalMode mode) {
  if (mode == EvalMode::exact) return Value(log_f_enc(m));
  return Value(std::log(f_of(m)));
}

}  // namespace seqspace
