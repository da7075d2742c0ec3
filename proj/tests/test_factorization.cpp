#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seqspace/factorization.hpp"

using namespace seqspace;

namespace {
ZConfig toy_cfg(EvalMode mode = EvalMode::floating) {
  ZConfig cfg;
  cfg.params = ParamSet::toy_default();
  cfg.mode = mode;
  return cfg;
}
}  // namespace

TEST_CASE("factorize rejects bad input") {
  Space L1 = Space::l1();
  CHECK_THROWS_AS(factorize(FinSeq{}, L1), std::domain_error);
  FinSeq neg = FinSeq::from_entries({{1, Rational(-1)}});
  CHECK_THROWS_AS(factorize(neg, L1), std::domain_error);
}

TEST_CASE("sup-norm space: the support indicator is the factor and phi vanishes") {
  Space Linf = Space::linf();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 25; ++t) {
    FinSeq u = oracle::random_nonneg(rng, 1, 10, 0.7);
    Factorization f = factorize(u, Linf);
    for (const auto& [j, v] : u.entries()) CHECK(f.x.at(j).get_d() == doctest::Approx(1.0));
    CHECK(std::fabs(f.phi.approx()) < 1e-12);
    CHECK(f.duality_gap.approx() < 1e-9);
    // x* recovers u itself
    CHECK(f.xstar == u.pointwise_div_on_support(f.x));
  }
}

TEST_CASE("l1: closed form (1/2,1/2) and the dense grid oracle at dimension 2") {
  Space L1 = Space::l1();
  FinSeq u = FinSeq::from_entries({{1, Rational(1, 2)}, {2, Rational(1, 2)}});
  Factorization f = factorize(u, L1);
  CHECK(f.x.at(1).get_d() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(f.x.at(2).get_d() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(f.xstar.at(1).get_d() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(f.phi.approx() == doctest::Approx(-std::log(2.0)).epsilon(1e-10));
  CHECK(f.duality_gap.approx() < 1e-8);

  // grid-search oracle on the positive sphere at dimension 2
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    FinSeq v = oracle::random_nonneg(rng, 1, 2, 1.0);
    if (v.support_size() != 2) continue;
    double grid = oracle::grid_factor_objective_dim2(v, L1, 4000);
    double got = factorize(v, L1).phi.approx();
    CHECK(got >= grid - 1e-6);
    CHECK(got <= grid + 1e-4 + 1e-6);  // grid resolution slack
  }
}

TEST_CASE("unit mass point: x = e_k, phi = 0 in every space") {
  for (const Space& X : {Space::l1(), Space::linf(), Space::z(toy_cfg()),
                         Space::z_dual(toy_cfg())}) {
    FinSeq u = FinSeq::unit(3);
    Factorization f = factorize(u, X);
    CHECK(f.x.at(3).get_d() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(f.phi.approx()) < 1e-9);
    CHECK(f.duality_gap.approx() < 1e-7);
  }
}

TEST_CASE("l1 solver matches the closed form on random inputs") {
  Space L1 = Space::l1();
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    FinSeq u = oracle::random_nonneg(rng, 1, 16, 0.8);
    double got = factorize(u, L1).phi.approx();
    double want = oracle::l1_indicator_closed(u);
    worst = std::max(worst, std::fabs(got - want));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("indicator homogeneity at alpha in {-2,-1,1/2,3}") {
  std::mt19937_64 rng(11);
  for (const Space& X : {Space::l1(), Space::z(toy_cfg())}) {
    for (int t = 0; t < 10; ++t) {
      FinSeq u = oracle::random_signed(rng, 1, 8, 0.8);
      double base = indicator(u, X).approx();
      for (Rational a : {Rational(-2), Rational(-1), Rational(1, 2), Rational(3)}) {
        double scaled = indicator(u.scaled(a), X).approx();
        CHECK(scaled == doctest::Approx(a.get_d() * base).epsilon(5e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("optimization consistency: no feasible point beats the reported maximum") {
  std::mt19937_64 rng(13);
  for (const Space& X : {Space::l1(), Space::z(toy_cfg())}) {
    for (int t = 0; t < 30; ++t) {
      FinSeq u = oracle::random_nonneg(rng, 1, 8, 0.9);
      double phi = indicator(u, X).approx();
      // random feasible competitor with the same support
      FinSeq cand = oracle::random_nonneg(rng, 1, 8, 1.0);
      FinSeq xp;
      for (const auto& [j, v] : u.entries()) {
        Rational c = cand.at(j);
        xp.set(j, sgn(c) > 0 ? c : Rational(1, 100));
      }
      double nrm = X.norm(xp).value.approx();
      xp = xp.scaled(rational_from_double(1.0 / nrm));
      double obj = signed_log_pairing(u, xp, X.mode()).approx();
      CHECK(obj <= phi + 1e-6);
    }
  }
}

TEST_CASE("defect: single part, split pair, sup-norm space, entropy ceiling") {
  Space L1 = Space::l1();
  Space Linf = Space::linf();
  FinSeq u1 = FinSeq::unit(1);
  DefectReport single = defect({u1}, L1);
  CHECK(std::fabs(single.delta.approx()) < 1e-12);

  // disjoint equal masses attain the entropy ceiling: unit masses give
  // delta = 2 log 2 = bound, half masses give delta = log 2 = bound
  DefectReport pair = defect({FinSeq::unit(1), FinSeq::unit(2)}, L1);
  CHECK(pair.delta.approx() == doctest::Approx(2 * std::log(2.0)).epsilon(1e-9));
  CHECK(pair.entropy_bound.approx() == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
  DefectReport halves =
      defect({FinSeq::unit(1).scaled(Rational(1, 2)), FinSeq::unit(2).scaled(Rational(1, 2))},
             L1);
  CHECK(halves.delta.approx() == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(halves.entropy_bound.approx() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    std::vector<FinSeq> parts;
    int n = 2 + t % 4;
    for (int i = 0; i < n; ++i) parts.push_back(oracle::random_nonneg(rng, 1, 6, 0.8));
    DefectReport d1 = defect(parts, Linf);
    CHECK(std::fabs(d1.delta.approx()) < 1e-9);
    DefectReport d2 = defect(parts, L1);
    CHECK(d2.delta.approx() >= -1e-9);
    CHECK(d2.delta.approx() <= d2.entropy_bound.approx() + 1e-6);
  }
  CHECK_THROWS_AS(defect({}, L1), std::invalid_argument);
}

TEST_CASE("two-term defect bound holds on random signed pairs in all spaces") {
  std::mt19937_64 rng(19);
  for (const Space& X : {Space::l1(), Space::linf(), Space::z(toy_cfg()),
                         Space::z_dual(toy_cfg())}) {
    SolveOpts opts;
    opts.certify = false;
    for (int t = 0; t < 40; ++t) {
      FinSeq u = oracle::random_signed(rng, 1, 8, 0.7);
      FinSeq v = oracle::random_signed(rng, 1, 8, 0.7);
      LemmaReport r = check_quasilinearity_bound(u, v, X, 1e-6, opts);
      CHECK(r.holds);
    }
    // v = 0 edge: |Delta| = 0
    FinSeq u = oracle::random_signed(rng, 1, 6, 0.9);
    LemmaReport r0 = check_quasilinearity_bound(u, FinSeq{}, X, 1e-9, opts);
    CHECK(r0.holds);
    CHECK(std::fabs(r0.lhs.approx()) < 1e-7);
  }
}

TEST_CASE("split additivity: random tuples and the proportional equality case") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    int n = 1 + t % 6;
    std::vector<Rational> s, tt;
    for (int i = 0; i < n; ++i) {
      s.push_back(Rational(rng() % 100, 97));
      tt.push_back(Rational(rng() % 100, 89));
    }
    LemmaReport r = check_split_additivity(s, tt, EvalMode::floating, 1e-9);
    CHECK(r.holds);
  }
  // proportional rows: equality within 1e-9
  std::vector<Rational> s = {Rational(1, 3), Rational(1, 6), Rational(1, 2)};
  std::vector<Rational> t2;
  for (const auto& v : s) t2.push_back(Rational(v * 2));
  LemmaReport eq = check_split_additivity(s, t2, EvalMode::exact, 1e-9);
  CHECK(eq.holds);
  CHECK(std::fabs(eq.margin.approx()) < 1e-9);
}

TEST_CASE("restricted defect sandwich on the qualifying spaces") {
  std::mt19937_64 rng(29);
  Space Zd = Space::z_dual(toy_cfg());
  Space Linf = Space::linf();
  SolveOpts opts;
  opts.certify = false;
  for (const Space& X : {Linf, Zd}) {
    for (int t = 0; t < 12; ++t) {
      auto blocks = oracle::random_successive_blocks(rng, 2 + rng() % 3, 3);
      // scale into the positive unit ball
      FinSeq whole;
      for (const auto& b : blocks) whole = whole + b;
      Rational mass = whole.l1_norm();
      std::vector<FinSeq> parts;
      for (const auto& b : blocks) parts.push_back(b.scaled(1 / mass));
      std::vector<Index> A;
      for (Index j = whole.a(); j <= whole.b(); ++j)
        if (rng() & 1) A.push_back(j);
      auto [lower, upper] = check_restricted_defect(parts, A, X, 1e-6, opts);
      CHECK(lower.applicable);
      CHECK(lower.holds);
      CHECK(upper.holds);
    }
  }
  // l1 lacks the upper estimate: the reports flag inapplicability
  auto blocks = oracle::random_successive_blocks(rng, 2, 3);
  FinSeq whole;
  for (const auto& b : blocks) whole = whole + b;
  std::vector<FinSeq> parts;
  for (const auto& b : blocks) parts.push_back(b.scaled(1 / Rational(whole.l1_norm())));
  auto [lo, up] = check_restricted_defect(parts, {whole.a()}, Space::l1(), 1e-6, opts);
  CHECK(!lo.applicable);
}

TEST_CASE("block defect bound on qualifying spaces") {
  std::mt19937_64 rng(31);
  SolveOpts opts;
  opts.certify = false;
  for (const Space& X : {Space::linf(), Space::z_dual(toy_cfg())}) {
    for (int t = 0; t < 10; ++t) {
      auto blocks = oracle::random_successive_blocks(rng, 2 + rng() % 4, 3);
      LemmaReport r = check_block_defect_bound(blocks, X, 1e-6, opts);
      CHECK(r.applicable);
      CHECK(r.holds);
    }
  }
}

TEST_CASE("near-optimal factor bound") {
  Space L1 = Space::l1();
  std::mt19937_64 rng(37);
  // the true factor: lhs = 0 <= rhs
  for (int t = 0; t < 10; ++t) {
    FinSeq u = oracle::random_nonneg(rng, 1, 6, 0.9);
    u = u.scaled(Rational(1) / (Rational(2) * u.l1_norm()));  // mass 1/2
    Factorization f = factorize(u, L1);
    LemmaReport r = check_near_optimal_factor(u, f.x, L1, 1e-6);
    CHECK(r.applicable);
    CHECK(r.holds);
    CHECK(r.lhs.approx() <= 1e-6);
  }
  // mass exactly 1 forces rhs = 0
  FinSeq u = FinSeq::from_entries({{1, Rational(1, 2)}, {2, Rational(1, 2)}});
  Factorization f = factorize(u, L1);
  LemmaReport r1 = check_near_optimal_factor(u, f.x, L1, 1e-6);
  CHECK(r1.applicable);
  CHECK(std::fabs(r1.rhs.approx()) < 1e-12);
  CHECK(r1.holds);
  // sup-norm space, mass 1/2, x = support indicator: lhs = 0 <= (1/2) log 2
  FinSeq v = FinSeq::from_entries({{1, Rational(1, 4)}, {3, Rational(1, 4)}});
  FinSeq chi = FinSeq::from_entries({{1, Rational(1)}, {3, Rational(1)}});
  LemmaReport r2 = check_near_optimal_factor(v, chi, Space::linf(), 1e-9);
  CHECK(r2.applicable);
  CHECK(r2.holds);
  CHECK(std::fabs(r2.lhs.approx()) < 1e-9);
  CHECK(r2.rhs.approx() == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  // infeasible x flags inapplicability
  FinSeq big = chi.scaled(Rational(3));
  LemmaReport r3 = check_near_optimal_factor(v, big, Space::linf(), 1e-9);
  CHECK(!r3.applicable);
}

TEST_CASE("z-space factorization: duality certificates at small supports") {
  Space Z = Space::z(toy_cfg());
  std::mt19937_64 rng(41);
  for (int t = 0; t < 15; ++t) {
    FinSeq u = oracle::random_nonneg(rng, 1, 6, 0.9);
    Factorization f = factorize(u, Z);
    CHECK(f.dual_checked);
    CHECK(f.duality_gap.approx() < 1e-5);
    CHECK(Z.norm(f.x).value.approx() <= 1.0 + 1e-9);
  }
}

TEST_CASE("dual-space factorization: swap route agrees with the direct ascent") {
  Space Zd = Space::z_dual(toy_cfg());
  std::mt19937_64 rng(43);
  for (int t = 0; t < 6; ++t) {
    FinSeq u = oracle::random_nonneg(rng, 1, 5, 1.0);
    SolveOpts swap_opts;
    Factorization fswap = factorize(u, Zd, swap_opts);
    SolveOpts direct;
    direct.force_direct = true;
    direct.max_iters = 3000;
    Factorization fdir = factorize(u, Zd, direct);
    CHECK(fswap.phi.approx() == doctest::Approx(fdir.phi.approx()).epsilon(2e-4));
    CHECK(fswap.duality_gap.approx() < 1e-5);
  }
}
