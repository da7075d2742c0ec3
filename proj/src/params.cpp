#include "seqspace/params.hpp"

#include <algorithm>

#include "seqspace/errors.hpp"

namespace seqspace {

bool geq_pow2(const Rational& lhs, const Rational& e) {
  if (sgn(lhs) <= 0) return false;
  // lhs >= 2^(n/d), d > 0  <=>  lhs^d >= 2^n.
  mpz_class n = e.get_num(), d = e.get_den();
  if (!n.fits_slong_p() || !d.fits_ulong_p())
    throw BudgetError("geq_pow2: exponent out of evaluable range");
  long ni = n.get_si();
  unsigned long di = d.get_ui();
  if (di > 1u << 20 || std::llabs(ni) > 1ll << 24)
    throw BudgetError("geq_pow2: exponent out of evaluable range");
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), lhs.get_num().get_mpz_t(), di);
  mpz_pow_ui(den.get_mpz_t(), lhs.get_den().get_mpz_t(), di);
  // num/den >= 2^ni
  if (ni >= 0) {
    mpz_class rhs;
    mpz_mul_2exp(rhs.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(ni));
    return num >= rhs;
  }
  mpz_class lhs2;
  mpz_mul_2exp(lhs2.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(-ni));
  return lhs2 >= den;
}

ParamSet ParamSet::toy_default() {
  ParamSet ps;
  ps.mode = Mode::toy;
  // Squares of the first primes: strictly increasing, every entry a square.
  ps.p = {4,   9,   25,  49,  121, 169, 289,  361,
          529, 841, 961, 1369, 1681, 1849, 2209, 2809};
  ps.sigma_exponent = Rational(1, 1024);
  ps.ris_exponent = Rational(1, 16);
  return ps;
}

ParamSet ParamSet::paper_default() {
  ParamSet ps;
  ps.mode = Mode::paper;
  return ps;
}

namespace {
bool is_square(std::uint64_t v) {
  mpz_class z(static_cast<unsigned long>(v));
  return mpz_perfect_square_p(z.get_mpz_t()) != 0;
}
// Number of bits of v (position of highest set bit + 1).
unsigned bits_of(std::uint64_t v) {
  unsigned b = 0;
  while (v) {
    ++b;
    v >>= 1;
  }
  return b;
}
std::uint64_t paper_a(std::uint64_t k) { return 128 * k * k + k; }
}  // namespace

void ParamSet::validate() const {
  if (mode == Mode::toy) {
    if (p.size() < 2) throw ParseError("params.p: need at least two elements");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!is_square(p[i]))
        throw ParseError("params.p[" + std::to_string(i) + "]: not a square");
      if (p[i] < 2) throw ParseError("params.p[" + std::to_string(i) + "]: too small");
      if (i > 0 && p[i] <= p[i - 1])
        throw ParseError("params.p[" + std::to_string(i) + "]: not strictly increasing");
    }
    if (sgn(sigma_exponent) <= 0) throw ParseError("params.sigma_exponent: must be > 0");
    if (sgn(ris_exponent) <= 0) throw ParseError("params.ris_exponent: must be > 0");
    return;
  }
  // Paper mode: p_k = 2^(2 a_k), a_k = 128 k^2 + k. All four defining
  // constraints are decided by integer arithmetic on the exponents.
  for (std::uint64_t k = 1; k <= paper_depth; ++k) {
    std::uint64_t a = paper_a(k);
    if (k == 1 && !(2 * a >= 256))
      throw ParseError("paper params: f(p_1) > 256 fails");  // f(2^(2a)) > 2a
    // p_k > k^6 2^(100 k^2): compare exponents; log2(k^6) <= 6 bits(k).
    if (!(2 * a >= 100 * k * k + 6 * bits_of(k) + 1))
      throw ParseError("paper params: p_k > k^6 2^(100k^2) fails at k=" + std::to_string(k));
    if (k > 1 && !(paper_a(k) > paper_a(k - 1)))
      throw ParseError("paper params: not increasing at k=" + std::to_string(k));
    // f(p_{2k}) / p_{2k} <= 1/(2 k^3): f(2^(2a)) < 2a + 1, so it suffices that
    // 2^(2a) >= 2 k^3 (2a + 1), checked via bit lengths.
    std::uint64_t a2 = paper_a(2 * k);
    if (!(2 * a2 >= 1 + 3 * bits_of(k) + bits_of(2 * a2 + 1) + 1))
      throw ParseError("paper params: f(p_2k)/p_2k bound fails at k=" + std::to_string(k));
  }
}

std::vector<std::uint64_t> ParamSet::p1() const {
  std::vector<std::uint64_t> r;
  for (std::size_t i = 0; i < p.size(); i += 2) r.push_back(p[i]);
  return r;
}
std::vector<std::uint64_t> ParamSet::p2() const {
  std::vector<std::uint64_t> r;
  for (std::size_t i = 1; i < p.size(); i += 2) r.push_back(p[i]);
  return r;
}
bool ParamSet::in_p1(std::uint64_t v) const {
  if (mode == Mode::paper) return false;  // paper members exceed any feasible value
  for (std::size_t i = 0; i < p.size(); i += 2)
    if (p[i] == v) return true;
  return false;
}

std::uint64_t ParamSet::p_at(std::size_t k) const {
  if (k == 0) throw std::invalid_argument("p_at: 1-based");
  if (mode == Mode::paper)
    throw BudgetError("paper-mode parameters are symbolic; p_" + std::to_string(k) +
                      " is not representable");
  if (k > p.size())
    throw BudgetError("params.p: index " + std::to_string(k) + " exceeds toy list of " +
                      std::to_string(p.size()));
  return p[k - 1];
}

Rational ParamSet::sigma_exp() const {
  return mode == Mode::toy ? sigma_exponent : Rational(10);
}
Rational ParamSet::ris_exp_entry() const {
  return mode == Mode::toy ? ris_exponent : Rational(36);
}
Rational ParamSet::ris_exp_chain() const {
  return mode == Mode::toy ? ris_exponent : Rational(4);
}

nlohmann::json ParamSet::to_json() const {
  nlohmann::json j;
  j["mode"] = mode == Mode::toy ? "toy" : "paper";
  if (mode == Mode::toy) {
    j["p"] = p;
    j["sigma_exponent"] = rational_to_string(sigma_exponent);
    j["ris_exponent"] = rational_to_string(ris_exponent);
  } else {
    j["paper_depth"] = paper_depth;
  }
  return j;
}

ParamSet ParamSet::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("params: expected object");
  if (!j.contains("mode") || !j["mode"].is_string())
    throw ParseError("params.mode: expected \"toy\" or \"paper\"");
  std::string m = j["mode"].get<std::string>();
  ParamSet ps;
  if (m == "toy") {
    ps.mode = Mode::toy;
    if (!j.contains("p") || !j["p"].is_array())
      throw ParseError("params.p: required array in toy mode");
    ps.p.clear();
    for (const auto& e : j["p"]) {
      if (!e.is_number_unsigned()) throw ParseError("params.p: entries must be naturals");
      ps.p.push_back(e.get<std::uint64_t>());
    }
    auto read_exp = [&](const char* key, Rational dflt) -> Rational {
      if (!j.contains(key)) return dflt;
      const auto& v = j[key];
      if (v.is_string()) return rational_from_string(v.get<std::string>());
      if (v.is_number()) return rational_from_double(v.get<double>());
      throw ParseError(std::string("params.") + key + ": expected number or string");
    };
    ps.sigma_exponent = read_exp("sigma_exponent", ps.sigma_exponent);
    ps.ris_exponent = read_exp("ris_exponent", ps.ris_exponent);
  } else if (m == "paper") {
    ps.mode = Mode::paper;
    if (j.contains("paper_depth")) ps.paper_depth = j["paper_depth"].get<std::uint64_t>();
  } else {
    throw ParseError("params.mode: expected \"toy\" or \"paper\"");
  }
  ps.validate();
  return ps;
}

std::string ParamSet::stamp() const {
  if (mode == Mode::paper) return "mode=paper (symbolic parameters)";
  std::string s = "mode=toy p=[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  s += "] sigma_exponent=" + rational_to_string(sigma_exponent) +
       " ris_exponent=" + rational_to_string(ris_exponent);
  return s;
}

}  // namespace seqspace
