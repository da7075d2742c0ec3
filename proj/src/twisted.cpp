#include "seqspace/twisted.hpp"

#include <cmath>

namespace seqspace {

bool TwistedVector::is_zero() const {
  if (!u.is_zero()) return false;
  for (const auto& a : alpha)
    if (sgn(a) != 0) return false;
  return true;
}

Value quasi_norm(const TwistedVector& v, const Space& X, const SolveOpts& opts) {
  if (v.alpha.size() != 1)
    throw std::invalid_argument("quasi_norm: scalar kernel expected; use quasi_norm_multi");
  Value phi = indicator(v.u, X, opts);
  return vabs(Value(v.alpha[0]) - phi) + Value(v.u.l1_norm());
}

FinSeq residue_class_compress(const FinSeq& u, std::uint64_t n, std::uint64_t k) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("residue class out of range");
  FinSeq out;
  for (const auto& [j, val] : u.entries()) {
    if ((j - 1) % n + 1 == k) out.set((j - 1) / n + 1, val);
  }
  return out;
}

Value quasi_norm_multi(const TwistedVector& v, const Space& X, const SolveOpts& opts) {
  const std::uint64_t n = v.alpha.size();
  if (n == 0) throw std::invalid_argument("quasi_norm_multi: empty kernel");
  Value worst = Value::zero();
  for (std::uint64_t k = 1; k <= n; ++k) {
    FinSeq sk = residue_class_compress(v.u, n, k);
    Value phik = indicator(sk, X, opts);
    worst = vmax(worst, vabs(Value(v.alpha[k - 1]) - phik));
  }
  return worst + Value(v.u.l1_norm());
}

FinSeq sample_unit_l1(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t dim,
                      bool signs) {
  // Mixed-concentration Dirichlet profile with Rademacher signs: alpha
  // rotates through sparse, flat and near-uniform shapes.
  static const double alphas[] = {0.3, 1.0, 3.0, 30.0};
  double a = alphas[rng() & 3];
  std::gamma_distribution<double> gamma(a, 1.0);
  std::vector<double> w(dim);
  double total = 0.0;
  for (auto& v : w) {
    v = gamma(rng);
    total += v;
  }
  if (total <= 0) {
    w.assign(dim, 1.0);
    total = static_cast<double>(dim);
  }
  FinSeq u;
  Rational mass(0);
  std::vector<Rational> vals(dim);
  for (std::uint64_t i = 0; i < dim; ++i) {
    Rational r = rational_from_double(w[i] / total);
    vals[i] = r;
    mass += r;
  }
  if (sgn(mass) == 0) {
    vals[0] = 1;
    mass = 1;
  }
  for (std::uint64_t i = 0; i < dim; ++i) {
    Rational r = vals[i] / mass;  // exact renormalization to unit mass
    if (sgn(r) == 0) continue;
    if (signs && (rng() & 1)) r = -r;
    u.set(lo + i, r);
  }
  return u;
}

SampleStats estimate_quasi_constant(const Space& X, int trials, std::uint64_t seed,
                                    std::uint64_t dim, const SolveOpts& opts) {
  if (trials < 1) throw std::invalid_argument("estimate_quasi_constant: trials >= 1");
  SampleStats st;
  st.seed = seed;
  st.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dims(1, dim);
  for (int t = 0; t < trials; ++t) {
    FinSeq u = sample_unit_l1(rng, 1, dims(rng), true);
    FinSeq v = sample_unit_l1(rng, 1, dims(rng), true);
    Value phi_u = indicator(u, X, opts);
    Value phi_v = indicator(v, X, opts);
    FinSeq s = u + v;
    Value phi_s = indicator(s, X, opts);
    double delta = std::fabs((phi_u + phi_v - phi_s).approx());
    double mass = Rational(u.l1_norm() + v.l1_norm()).get_d();
    if (mass > 0) st.max_value = std::max(st.max_value, delta / mass);
  }
  return st;
}

SampleStats probe_subspace_boundedness(const Space& X, const std::vector<FinSeq>& basis,
                                       int samples, std::uint64_t seed,
                                       const SolveOpts& opts) {
  if (basis.empty()) throw std::invalid_argument("probe_subspace_boundedness: empty basis");
  const std::size_t n = basis.size();
  SampleStats st;
  st.seed = seed;
  st.trials = samples;
  std::mt19937_64 rng(seed);

  auto eval_coeffs = [&](const std::vector<Rational>& c) -> double {
    FinSeq u;
    for (std::size_t i = 0; i < n; ++i) u = u + basis[i].scaled(c[i]);
    if (u.is_zero()) return 0.0;
    Rational m = u.l1_norm();
    u = u.scaled(Rational(1) / m);  // probe on the unit sphere of l1
    return std::fabs(indicator(u, X, opts).approx());
  };

  // Deterministic flat combination first: it witnesses the entropy maximum
  // for coordinate bases and seeds the curve.
  {
    std::vector<Rational> flat(n, Rational(1, static_cast<unsigned long>(n)));
    st.max_value = eval_coeffs(flat);
    st.curve.push_back(st.max_value);
  }
  for (int t = 1; t < samples; ++t) {
    FinSeq coeff = sample_unit_l1(rng, 1, n, true);
    std::vector<Rational> c(n, Rational(0));
    for (const auto& [j, v] : coeff.entries()) c[j - 1] = v;
    // degenerate draw (linear dependence in the combination) just yields 0
    st.max_value = std::max(st.max_value, eval_coeffs(c));
    st.curve.push_back(st.max_value);
  }
  return st;
}

SampleStats quasi_triangle_constant(const Space& X, int trials, std::uint64_t seed,
                                    std::uint64_t dim, const SolveOpts& opts) {
  if (trials < 1) throw std::invalid_argument("quasi_triangle_constant: trials >= 1");
  SampleStats st;
  st.seed = seed;
  st.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dims(1, dim);
  std::uniform_real_distribution<double> alpha_draw(-2.0, 2.0);
  for (int t = 0; t < trials; ++t) {
    TwistedVector v1(rational_from_double(alpha_draw(rng)),
                     sample_unit_l1(rng, 1, dims(rng), true));
    TwistedVector v2(rational_from_double(alpha_draw(rng)),
                     sample_unit_l1(rng, 1, dims(rng), true));
    double n1 = quasi_norm(v1, X, opts).approx();
    double n2 = quasi_norm(v2, X, opts).approx();
    TwistedVector s(v1.alpha[0] + v2.alpha[0], v1.u + v2.u);
    double ns = quasi_norm(s, X, opts).approx();
    if (n1 + n2 > 1e-12) st.max_value = std::max(st.max_value, ns / (n1 + n2));
  }
  return st;
}

}  // namespace seqspace
