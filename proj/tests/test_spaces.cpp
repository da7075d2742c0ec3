#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seqspace/errors.hpp"
#include "seqspace/spaces.hpp"

using namespace seqspace;

namespace {
ZConfig toy_cfg(EvalMode mode = EvalMode::floating) {
  ZConfig cfg;
  cfg.params = ParamSet::toy_default();
  cfg.mode = mode;
  return cfg;
}
FinSeq ones(Index lo, std::uint64_t n) {
  FinSeq s;
  for (std::uint64_t i = 0; i < n; ++i) s.set(lo + i, Rational(1));
  return s;
}
}  // namespace

TEST_CASE("classical norms") {
  Space L1 = Space::l1(), Linf = Space::linf();
  CHECK(L1.norm(FinSeq{}).value.approx() == 0.0);
  CHECK(Linf.norm(FinSeq{}).value.approx() == 0.0);
  FinSeq pm = FinSeq::from_entries({{1, Rational(1)}, {2, Rational(-1)}});
  CHECK(L1.norm(pm).value.rational() == Rational(2));
  CHECK(Linf.norm(pm).value.rational() == Rational(1));
  CHECK(L1.norm(FinSeq::unit(7)).value.rational() == Rational(1));
  CHECK(Linf.norm(FinSeq::unit(7)).value.rational() == Rational(1));
}

TEST_CASE("unit vectors have z norm exactly one (exact mode)") {
  Space Z = Space::z(toy_cfg(EvalMode::exact));
  for (Index n = 1; n <= 64; ++n) {
    NormCert c = Z.norm(FinSeq::unit(n));
    CHECK(c.value.lower() == 1.0);
    CHECK(c.value.upper() == 1.0);
    CHECK(c.kind == CertKind::exact);
  }
}

TEST_CASE("two-point flat vector: frozen value against enumeration") {
  // max(1, (|x_1|+|x_2|)/f(2)) at x = e1 + e2: 2/log2(3).
  const double frozen = 1.2618595071429148;
  oracle::NormingSet ns(2);
  CHECK(ns.norm({1.0, 1.0}) == doctest::Approx(frozen).epsilon(1e-13));

  Space Z = Space::z(toy_cfg());
  FinSeq x = ones(1, 2);
  CHECK(Z.norm(x).value.approx() == doctest::Approx(frozen).epsilon(1e-13));
  Space Zx = Space::z(toy_cfg(EvalMode::exact));
  Value v = Zx.norm(x).value;
  CHECK(v.lower() <= frozen);
  CHECK(v.upper() >= frozen - 1e-15);
  CHECK(v.upper() - v.lower() < 1e-12);
}

TEST_CASE("flat vectors follow n/f(n) and match enumeration at small n") {
  Space Z = Space::z(toy_cfg());
  for (std::uint64_t n = 2; n <= 20; ++n) {
    double expect = static_cast<double>(n) / f_of(n);
    double got = Z.norm(ones(1, n)).value.approx();
    CHECK(got == doctest::Approx(expect).epsilon(1e-9));
  }
  for (std::uint64_t n = 2; n <= 6; ++n) {
    oracle::NormingSet ns(n);
    std::vector<double> flat(n, 1.0);
    CHECK(ns.norm(flat) ==
          doctest::Approx(static_cast<double>(n) / f_of(n)).epsilon(1e-12));
  }
}

TEST_CASE("norm levels: base case, monotonicity, stabilization at the fixed point") {
  Space Z = Space::z(toy_cfg());
  std::mt19937_64 rng(17);
  for (int t = 0; t < 40; ++t) {
    FinSeq x = oracle::random_signed(rng, 1, 10, 0.8);
    CHECK(Z.norm_level(x, 0).approx() ==
          doctest::Approx(x.linf_norm().get_d()).epsilon(1e-12));
    double prev = Z.norm_level(x, 0).approx();
    for (unsigned L = 1; L <= x.support_size() + 2; ++L) {
      double cur = Z.norm_level(x, L).approx();
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
    double fixed = Z.norm(x).value.approx();
    CHECK(Z.norm_level(x, static_cast<unsigned>(x.support_size())).approx() ==
          doctest::Approx(fixed).epsilon(1e-10));
    CHECK(prev == doctest::Approx(fixed).epsilon(1e-10));
    CHECK(prev <= x.l1_norm().get_d() + 1e-12);
  }
}

TEST_CASE("sandwich, unconditionality, lattice monotonicity") {
  Space Z = Space::z(toy_cfg());
  std::mt19937_64 rng(23);
  for (int t = 0; t < 500; ++t) {
    FinSeq x = oracle::random_signed(rng, 1, 18, 0.6);
    double nz = Z.norm(x).value.approx();
    CHECK(nz >= x.linf_norm().get_d() - 1e-12);
    CHECK(nz <= x.l1_norm().get_d() + 1e-12);
    CHECK(Z.norm(x.abs()).value.approx() == doctest::Approx(nz).epsilon(1e-12));
    FinSeq flip;
    for (const auto& [j, v] : x.entries()) flip.set(j, (rng() & 1) ? v : Rational(-v));
    CHECK(Z.norm(flip).value.approx() == doctest::Approx(nz).epsilon(1e-12));
    FinSeq y = x.abs() + oracle::random_nonneg(rng, 1, 18, 0.5);
    CHECK(Z.norm(y).value.approx() >= nz - 1e-10);
  }
}

TEST_CASE("witness soundness: certificates re-evaluate to their value") {
  Space Z = Space::z(toy_cfg());
  std::mt19937_64 rng(29);
  for (int t = 0; t < 50; ++t) {
    FinSeq x = oracle::random_signed(rng, 1, 12, 0.7);
    NormCert c = Z.norm(x, /*with_witness=*/true);
    REQUIRE(c.witness.has_value());
    double re = Z.evaluate_witness(*c.witness, x).approx();
    CHECK(re == doctest::Approx(c.value.approx()).epsilon(1e-12));
  }
  Space Zx = Space::z(toy_cfg(EvalMode::exact));
  for (int t = 0; t < 10; ++t) {
    FinSeq x = oracle::random_signed(rng, 1, 8, 0.8);
    NormCert c = Zx.norm(x, true);
    REQUIRE(c.witness.has_value());
    Value re = Zx.evaluate_witness(*c.witness, x);
    CHECK(re.lower() == c.value.lower());
    CHECK(re.upper() <= c.value.upper() + 1e-17);
  }
}

TEST_CASE("norm agrees with exhaustive enumeration at support <= 6") {
  Space Z = Space::z(toy_cfg());
  std::mt19937_64 rng(31);
  for (std::size_t k = 2; k <= 6; ++k) {
    oracle::NormingSet ns(k);
    for (int t = 0; t < 25; ++t) {
      std::vector<double> absval(k);
      FinSeq x;
      for (std::size_t p = 0; p < k; ++p) {
        double v = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        absval[p] = v;
        x.set(p + 1, rational_from_double(v));
      }
      CHECK(Z.norm(x).value.approx() ==
            doctest::Approx(ns.norm(absval)).epsilon(1e-10));
    }
  }
}

TEST_CASE("dual norm: units, zero, agreement with the enumerated-set LP") {
  Space Z = Space::z(toy_cfg());
  CHECK(Z.dual_norm(FinSeq{}).value.approx() == 0.0);
  for (Index n : {1, 3, 9}) {
    NormCert c = Z.dual_norm(FinSeq::unit(n));
    CHECK(c.value.approx() == doctest::Approx(1.0).epsilon(1e-8));
  }
  std::mt19937_64 rng(37);
  for (std::size_t k = 2; k <= 6; ++k) {
    oracle::NormingSet ns(k);
    for (int t = 0; t < 15; ++t) {
      std::vector<double> xv(k);
      FinSeq x;
      for (std::size_t p = 0; p < k; ++p) {
        double v = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        xv[p] = v;
        x.set(p + 1, rational_from_double(v));
      }
      double want = ns.dual_norm(xv);
      NormCert c = Z.dual_norm(x);
      CHECK(c.value.approx() == doctest::Approx(want).epsilon(1e-7));
      CHECK(c.gap.approx() <= 1e-6 * std::max(1.0, want));
      REQUIRE(c.achiever.has_value());
      double zp = pairing(x, *c.achiever).get_d();
      double zn = Z.norm(*c.achiever).value.approx();
      CHECK(zp / std::max(1.0, zn) == doctest::Approx(c.value.approx()).epsilon(1e-8));
    }
  }
}

TEST_CASE("dual norm is the bidual of the dual space") {
  ZConfig cfg = toy_cfg();
  Space Z = Space::z(cfg);
  Space Zd = Space::z_dual(cfg);
  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    FinSeq x = oracle::random_signed(rng, 1, 8, 0.9);
    CHECK(Zd.norm(x).value.approx() ==
          doctest::Approx(Z.dual_norm(x).value.approx()).epsilon(1e-10));
    CHECK(Zd.dual_norm(x).value.approx() ==
          doctest::Approx(Z.norm(x).value.approx()).epsilon(1e-12));
  }
}

TEST_CASE("registered special sequences feed the chained part of the norm") {
  ParamSet ps = ParamSet::toy_default();
  auto reg = std::make_shared<SigmaRegistry>(ps);
  // Four forms at level 3, each three unit parts over a consecutive triple:
  // applied to the flat vector on 12 coordinates each form pairs to 3/f(3).
  SpecialSequence s;
  s.k = 4;
  for (int i = 0; i < 4; ++i) {
    std::vector<FinSeq> parts;
    for (int j = 0; j < 3; ++j) parts.push_back(FinSeq::unit(3 * i + j + 1));
    s.forms.push_back(MGForm(BlockFamily(parts), 3));
    s.levels.push_back(3);
  }
  reg->register_special(s);

  ZConfig cfg = toy_cfg();
  cfg.registry = reg;
  Space Z = Space::z(cfg);
  FinSeq x = ones(1, 12);
  // chained value: f(4)^{-1/2} * 4 * (3/f(3)) = 6 / sqrt(log2 5); the scaled
  // sums only reach 12/f(12) ~ 3.24, so the chained functional must win.
  double expect = 6.0 / std::sqrt(f_of(4));
  NormCert c = Z.norm(x, true);
  CHECK(c.value.approx() == doctest::Approx(expect).epsilon(1e-12));
  REQUIRE(c.witness.has_value());
  CHECK(c.witness->kind == FormTree::Kind::special);
  CHECK(Z.evaluate_witness(*c.witness, x).approx() ==
        doctest::Approx(expect).epsilon(1e-12));

  Space Z0 = Space::z(toy_cfg());
  CHECK(Z0.norm(x).value.approx() < expect - 0.5);
}

TEST_CASE("f-estimates: lower on z, upper on the dual, single-block equality") {
  ZConfig cfg = toy_cfg();
  Space Z = Space::z(cfg);
  Space Zd = Space::z_dual(cfg);
  std::mt19937_64 rng(43);

  FinSeq single = oracle::random_nonneg(rng, 1, 4);
  LemmaReport one = check_lower_f_estimate(Z, BlockFamily({single}), 1e-9);
  CHECK(one.holds);
  CHECK(std::fabs(one.margin.approx()) < 1e-9);  // equality at one block

  for (int t = 0; t < 25; ++t) {
    auto blocks = oracle::random_successive_blocks(rng, 2 + rng() % 3, 4);
    LemmaReport lo = check_lower_f_estimate(Z, BlockFamily(blocks), 1e-9);
    CHECK(lo.holds);
    LemmaReport up = check_upper_f_estimate(Zd, BlockFamily(blocks), 1e-6);
    CHECK(up.holds);
  }
}

TEST_CASE("support guards") {
  ZConfig cfg = toy_cfg();
  cfg.max_support = 8;
  Space Z = Space::z(cfg);
  CHECK_THROWS_AS(Z.norm(ones(1, 9)), BudgetError);
  ZConfig cfg2 = toy_cfg();
  cfg2.witness_max_support = 4;
  Space Z2 = Space::z(cfg2);
  CHECK_NOTHROW(Z2.norm(ones(1, 6)));
  CHECK_THROWS_AS(Z2.norm(ones(1, 6), true), BudgetError);
}
