#include "seqspace/scalar.hpp"

#include <mpfr.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace seqspace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double next_down(double v) {
  if (std::isinf(v)) return v;
  return std::nextafter(v, -kInf);
}
double next_up(double v) {
  if (std::isinf(v)) return v;
  return std::nextafter(v, kInf);
}

// Wrap an mpfr computation rounded down/up into a double pair.
template <typename F>
Enc mpfr_enclose(F&& fill) {
  mpfr_t t;
  mpfr_init2(t, 128);
  fill(t, MPFR_RNDD);
  double lo = mpfr_get_d(t, MPFR_RNDD);
  fill(t, MPFR_RNDU);
  double hi = mpfr_get_d(t, MPFR_RNDU);
  mpfr_clear(t);
  return {lo, hi};
}

}  // namespace

Rational rational_from_double(double d) {
  if (!std::isfinite(d)) throw std::domain_error("rational_from_double: non-finite");
  Rational q;
  mpq_set_d(q.get_mpq_t(), d);  // doubles are dyadic rationals; conversion is exact
  q.canonicalize();
  return q;
}

Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
      throw std::invalid_argument("bad rational literal: " + s);
    if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
      throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
  }
  if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
      s.find('E') != std::string::npos) {
    size_t pos = 0;
    double d = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad numeric literal: " + s);
    return rational_from_double(d);
  }
  Rational q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
    throw std::invalid_argument("bad integer literal: " + s);
  q.canonicalize();
  return q;
}

std::string rational_to_string(const Rational& q) { return q.get_str(); }

Enc Enc::of_rational(const Rational& q) {
  return mpfr_enclose([&](mpfr_t t, mpfr_rnd_t r) { mpfr_set_q(t, q.get_mpq_t(), r); });
}

Enc enc_add(const Enc& a, const Enc& b) {
  if (a.lo == 0.0 && a.hi == 0.0) return b;  // exact-zero operands stay exact
  if (b.lo == 0.0 && b.hi == 0.0) return a;
  return {next_down(a.lo + b.lo), next_up(a.hi + b.hi)};
}
Enc enc_sub(const Enc& a, const Enc& b) {
  if (b.lo == 0.0 && b.hi == 0.0) return a;
  return {next_down(a.lo - b.hi), next_up(a.hi - b.lo)};
}
Enc enc_mul(const Enc& a, const Enc& b) {
  double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  double lo = c[0], hi = c[0];
  for (double v : c) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return {next_down(lo), next_up(hi)};
}
Enc enc_div(const Enc& a, const Enc& b) {
  if (b.lo <= 0.0 && b.hi >= 0.0) throw std::domain_error("enc_div: divisor contains 0");
  double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
  double lo = c[0], hi = c[0];
  for (double v : c) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return {next_down(lo), next_up(hi)};
}
Enc enc_neg(const Enc& a) { return {-a.hi, -a.lo}; }
Enc enc_abs(const Enc& a) {
  if (a.lo >= 0) return a;
  if (a.hi <= 0) return enc_neg(a);
  return {0.0, std::max(-a.lo, a.hi)};
}
Enc enc_max(const Enc& a, const Enc& b) { return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)}; }
Enc enc_min(const Enc& a, const Enc& b) { return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)}; }
Enc enc_sqrt(const Enc& a) {
  if (a.lo < 0) throw std::domain_error("enc_sqrt: negative");
  return {next_down(std::sqrt(a.lo)), next_up(std::sqrt(a.hi))};
}

Enc log_enc(const Rational& q) {
  if (sgn(q) <= 0) throw std::domain_error("log_enc: argument <= 0");
  return mpfr_enclose([&](mpfr_t t, mpfr_rnd_t r) {
    mpfr_set_q(t, q.get_mpq_t(), r);
    mpfr_log(t, t, r);
  });
}

Enc log2p1_enc(const Rational& n) {
  Rational a = n + 1;
  if (sgn(a) <= 0) throw std::domain_error("log2p1_enc: argument+1 <= 0");
  return mpfr_enclose([&](mpfr_t t, mpfr_rnd_t r) {
    mpfr_set_q(t, a.get_mpq_t(), r);
    mpfr_log2(t, t, r);
  });
}

Enc const_e_enc() {
  return mpfr_enclose([&](mpfr_t t, mpfr_rnd_t r) {
    mpfr_set_ui(t, 1, r);
    mpfr_exp(t, t, r);
  });
}

double Value::lower() const {
  if (is_rational()) return Enc::of_rational(rational()).lo;
  if (is_enclosure()) return std::get<Enc>(v_).lo;
  return std::get<double>(v_);
}
double Value::upper() const {
  if (is_rational()) return Enc::of_rational(rational()).hi;
  if (is_enclosure()) return std::get<Enc>(v_).hi;
  return std::get<double>(v_);
}
double Value::approx() const {
  if (is_rational()) return rational().get_d();
  if (is_enclosure()) return std::get<Enc>(v_).mid();
  return std::get<double>(v_);
}

namespace {
// Promotion: double wins (floating mode), then enclosure, then rational.
enum class Rank { rat, enc, dbl };
Rank rank_of(const Value& v) {
  if (v.is_double()) return Rank::dbl;
  if (v.is_enclosure()) return Rank::enc;
  return Rank::rat;
}
Enc as_enc(const Value& v) {
  if (v.is_enclosure()) return Enc{v.lower(), v.upper()};
  return Enc::of_rational(v.rational());
}
}  // namespace

#define SEQSPACE_VALUE_BINOP(name, ratop, encop, dblop)              \
  Value Value::name(const Value& o) const {                          \
    Rank r = std::max(rank_of(*this), rank_of(o));                   \
    if (r == Rank::dbl) return Value(dblop);                         \
    if (r == Rank::enc) return Value(encop(as_enc(*this), as_enc(o))); \
    return Value(Rational(ratop));                                   \
  }

SEQSPACE_VALUE_BINOP(operator+, rational() + o.rational(), enc_add, approx() + o.approx())
SEQSPACE_VALUE_BINOP(operator-, rational() - o.rational(), enc_sub, approx() - o.approx())
SEQSPACE_VALUE_BINOP(operator*, rational() * o.rational(), enc_mul, approx() * o.approx())
#undef SEQSPACE_VALUE_BINOP

Value Value::operator/(const Value& o) const {
  Rank r = std::max(rank_of(*this), rank_of(o));
  if (r == Rank::dbl) return Value(approx() / o.approx());
  if (r == Rank::enc) return Value(enc_div(as_enc(*this), as_enc(o)));
  if (sgn(o.rational()) == 0) throw std::domain_error("Value: division by zero");
  return Value(Rational(rational() / o.rational()));
}

Value Value::operator-() const {
  if (is_double()) return Value(-approx());
  if (is_enclosure()) return Value(enc_neg(as_enc(*this)));
  return Value(Rational(-rational()));
}

Value vmax(const Value& a, const Value& b) {
  Rank r = std::max(rank_of(a), rank_of(b));
  if (r == Rank::dbl) return Value(std::max(a.approx(), b.approx()));
  if (r == Rank::enc) return Value(enc_max(as_enc(a), as_enc(b)));
  return Value(Rational(a.rational() > b.rational() ? a.rational() : b.rational()));
}
Value vmin(const Value& a, const Value& b) {
  Rank r = std::max(rank_of(a), rank_of(b));
  if (r == Rank::dbl) return Value(std::min(a.approx(), b.approx()));
  if (r == Rank::enc) return Value(enc_min(as_enc(a), as_enc(b)));
  return Value(Rational(a.rational() < b.rational() ? a.rational() : b.rational()));
}
Value vabs(const Value& a) {
  if (a.is_double()) return Value(std::fabs(a.approx()));
  if (a.is_enclosure()) return Value(enc_abs(as_enc(a)));
  return Value(Rational(abs(a.rational())));
}

bool leq(const Value& a, const Value& b, double tol) {
  if (a.is_rational() && b.is_rational() && tol == 0.0)
    return a.rational() <= b.rational();
  if (a.is_rational() && b.is_rational())
    return a.rational() <= b.rational() + rational_from_double(tol);
  return a.upper() <= b.lower() + tol;
}

std::string Value::str() const {
  if (is_rational()) return rational_to_string(rational());
  if (is_enclosure()) {
    const Enc& e = std::get<Enc>(v_);
    return "[" + format_double(e.lo) + "," + format_double(e.hi) + "]";
  }
  return format_double(std::get<double>(v_));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace seqspace
