#pragma once
// Numeric kernel: exact rationals, certified enclosures, and the Value type
// that norm and entropy evaluations return.
//
// Storage arithmetic (sequence entries, pairings, masses) is always exact
// rational. Transcendental evaluations (log, log2) produce either a plain
// double (floating mode) or a directed-rounding enclosure [lo,hi] that is
// guaranteed to contain the true real (exact mode).

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <gmpxx.h>

namespace seqspace {

using Rational = mpq_class;

enum class EvalMode { exact, floating };

Rational rational_from_double(double d);
Rational rational_from_string(const std::string& s);  // "p/q" or decimal/integer
std::string rational_to_string(const Rational& q);

// Certified enclosure: lo <= true value <= hi with lo, hi finite doubles
// (or +/-inf at the extremes). All operations round outward.
struct Enc {
  double lo = 0.0;
  double hi = 0.0;

  static Enc point(double v) { return {v, v}; }
  static Enc of_rational(const Rational& q);
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

Enc enc_add(const Enc& a, const Enc& b);
Enc enc_sub(const Enc& a, const Enc& b);
Enc enc_mul(const Enc& a, const Enc& b);
Enc enc_div(const Enc& a, const Enc& b);  // requires 0 not in b
Enc enc_neg(const Enc& a);
Enc enc_abs(const Enc& a);
Enc enc_max(const Enc& a, const Enc& b);
Enc enc_min(const Enc& a, const Enc& b);
Enc enc_sqrt(const Enc& a);

// Natural log of a positive rational, certified. Throws std::domain_error
// on q <= 0.
Enc log_enc(const Rational& q);
// log2(n + 1) for a natural argument, certified.
Enc log2p1_enc(const Rational& n);
// Euler's number, certified.
Enc const_e_enc();

// Scalar result of an evaluation: exact rational when the computation stayed
// in the rational field, an enclosure in exact mode otherwise, a plain
// double in floating mode.
class Value {
 public:
  Value() : v_(Rational(0)) {}
  Value(Rational q) : v_(std::move(q)) {}
  Value(const Enc& e) : v_(e) {}
  explicit Value(double d) : v_(d) {}
  static Value zero() { return Value(); }

  bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  bool is_enclosure() const { return std::holds_alternative<Enc>(v_); }
  bool is_double() const { return std::holds_alternative<double>(v_); }

  const Rational& rational() const { return std::get<Rational>(v_); }

  // Outward bounds; exact rationals are bracketed by adjacent doubles.
  double lower() const;
  double upper() const;
  double approx() const;  // midpoint / nearest double

  Value operator+(const Value& o) const;
  Value operator-(const Value& o) const;
  Value operator*(const Value& o) const;
  Value operator/(const Value& o) const;
  Value operator-() const;

  friend Value vmax(const Value& a, const Value& b);
  friend Value vmin(const Value& a, const Value& b);
  friend Value vabs(const Value& a);

  // Certified / tolerance comparisons.
  // leq(a,b,tol): true when a <= b + tol is certain at the carried precision.
  friend bool leq(const Value& a, const Value& b, double tol);
  friend bool geq(const Value& a, const Value& b, double tol);

  std::string str() const;  // diagnostic formatting

 private:
  std::variant<Rational, Enc, double> v_;
};

inline bool geq(const Value& a, const Value& b, double tol) { return leq(b, a, tol); }

// Fixed, locale-independent formatting used by reports ("%.17g" semantics).
std::string format_double(double v);

}  // namespace seqspace
