#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seqspace/fin_seq.hpp"

using namespace seqspace;

TEST_CASE("restriction: empty set, full support, single coordinate") {
  FinSeq x = FinSeq::from_entries({{1, Rational(3)}, {2, Rational(5)}});
  CHECK(restrict(std::vector<Index>{}, x).is_zero());
  CHECK(restrict(x.support(), x) == x);
  FinSeq r = restrict(std::vector<Index>{1}, x);
  CHECK(r.at(1) == Rational(3));
  CHECK(r.at(2) == Rational(0));
  CHECK(r.support_size() == 1);
}

TEST_CASE("restriction is idempotent, linear, and complements to the identity") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    FinSeq x = oracle::random_signed(rng, 1, 12, 0.7);
    std::vector<Index> A;
    for (Index j = 1; j <= 12; ++j)
      if (rng() & 1) A.push_back(j);
    FinSeq ax = restrict(A, x);
    CHECK(restrict(A, ax) == ax);
    CHECK(ax + restrict_complement(A, x) == x);
    FinSeq y = oracle::random_signed(rng, 1, 12, 0.7);
    CHECK(restrict(A, x + y) == restrict(A, x) + restrict(A, y));
  }
}

TEST_CASE("pairing basics") {
  CHECK(pairing(FinSeq::unit(1), FinSeq::unit(2)) == Rational(0));
  CHECK(pairing(FinSeq::unit(1), FinSeq::unit(1)) == Rational(1));
  FinSeq x = FinSeq::from_entries({{1, Rational(1)}, {2, Rational(2)}});
  FinSeq y = FinSeq::from_entries({{1, Rational(3)}, {2, Rational(4)}});
  CHECK(pairing(x, y) == Rational(11));
}

TEST_CASE("log pairing conventions and the forced -infinity") {
  FinSeq u1 = FinSeq::from_entries({{1, Rational(1)}});
  FinSeq ones = FinSeq::from_entries({{1, Rational(1)}, {2, Rational(1)}});
  auto v = log_pairing(u1, ones, EvalMode::exact);
  REQUIRE(v.has_value());
  CHECK(v->approx() == doctest::Approx(0.0).epsilon(1e-15));

  FinSeq e2 = FinSeq::unit(2);
  CHECK(!log_pairing(u1, e2, EvalMode::exact).has_value());

  FinSeq half = FinSeq::from_entries({{1, Rational(1, 2)}, {2, Rational(1, 2)}});
  auto w = log_pairing(half, half, EvalMode::exact);
  REQUIRE(w.has_value());
  // independent reference: long-double evaluation of -log 2
  long double ref = -std::log(2.0L);
  CHECK(w->lower() <= static_cast<double>(ref) + 1e-15);
  CHECK(w->upper() >= static_cast<double>(ref) - 1e-15);
  CHECK(std::fabs(w->approx() - static_cast<double>(ref)) < 1e-14);

  FinSeq neg = FinSeq::from_entries({{1, Rational(-1)}});
  CHECK_THROWS_AS(log_pairing(neg, ones, EvalMode::exact), std::domain_error);
}

TEST_CASE("log pairing is monotone in the second argument") {
  std::mt19937_64 rng(11);
  int done = 0;
  for (int t = 0; t < 1000; ++t) {
    FinSeq u = oracle::random_nonneg(rng, 1, 8, 0.8);
    FinSeq v = oracle::random_nonneg(rng, 1, 8, 1.0);
    FinSeq bump = oracle::random_nonneg(rng, 1, 8, 1.0);
    FinSeq w = v + bump;  // 0 <= v <= w pointwise
    auto lv = log_pairing(u, v, EvalMode::floating);
    auto lw = log_pairing(u, w, EvalMode::floating);
    if (!lv.has_value()) continue;  // -inf <= anything
    REQUIRE(lw.has_value());
    CHECK(lv->approx() <= lw->approx() + 1e-12);
    ++done;
  }
  CHECK(done > 500);
}

TEST_CASE("entropy phi: endpoints, maximum, quarter point, concavity") {
  CHECK(entropy_phi(Rational(0), EvalMode::exact).approx() == 0.0);
  CHECK(entropy_phi(Rational(1), EvalMode::exact).approx() == 0.0);
  Value mid = entropy_phi(Rational(1, 2), EvalMode::exact);
  CHECK(std::fabs(mid.approx() - std::log(2.0)) < 1e-14);
  // phi(1/4) = (1/4) log 4 + (3/4) log(4/3), evaluated independently
  long double ref = 0.25L * std::log(4.0L) + 0.75L * std::log(4.0L / 3.0L);
  Value q = entropy_phi(Rational(1, 4), EvalMode::exact);
  CHECK(std::fabs(q.approx() - static_cast<double>(ref)) < 1e-14);
  // phi <= log 2 and concavity on a grid
  const int G = 1000;
  for (int a = 0; a <= G; ++a) {
    Rational s(a, G);
    Value ps = entropy_phi(s, EvalMode::floating);
    CHECK(ps.approx() <= std::log(2.0) + 1e-12);
    if (a + 2 <= G) {
      Rational t(a + 2, G);
      Value pt = entropy_phi(t, EvalMode::floating);
      Value pm = entropy_phi(Rational(a + 1, G), EvalMode::floating);
      CHECK(pm.approx() >= 0.5 * (ps.approx() + pt.approx()) - 1e-12);
    }
  }
  CHECK_THROWS_AS(entropy_phi(Rational(2), EvalMode::exact), std::domain_error);
}

TEST_CASE("positive/negative split") {
  FinSeq xi = FinSeq::from_entries({{1, Rational(1)}, {2, Rational(-1)}});
  auto [p, q] = split_pos_neg(xi);
  CHECK(p == FinSeq::unit(1));
  CHECK(q == FinSeq::unit(2));

  FinSeq nn = FinSeq::from_entries({{3, Rational(2)}, {5, Rational(1)}});
  auto [p2, q2] = split_pos_neg(nn);
  CHECK(p2 == nn);
  CHECK(q2.is_zero());

  FinSeq m = FinSeq::from_entries({{1, Rational(-2)}, {2, Rational(3)}, {3, Rational(-1)}});
  auto [p3, q3] = split_pos_neg(m);
  CHECK(p3 == FinSeq::from_entries({{2, Rational(3)}}));
  CHECK(q3 == FinSeq::from_entries({{1, Rational(2)}, {3, Rational(1)}}));
  CHECK(p3 - q3 == m);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    FinSeq x = oracle::random_signed(rng, 1, 10, 0.6);
    auto [pp, qq] = split_pos_neg(x);
    CHECK(pp.is_nonneg());
    CHECK(qq.is_nonneg());
    CHECK(pp - qq == x);
    CHECK(pairing(pp, qq) == Rational(0));  // disjoint supports
  }
}

TEST_CASE("exact arithmetic is reproducible bit for bit") {
  std::mt19937_64 rng(42);
  FinSeq x = oracle::random_signed(rng, 1, 20, 0.8);
  FinSeq y = oracle::random_signed(rng, 1, 20, 0.8);
  Rational p1 = pairing(x, y);
  Rational p2 = pairing(x, y);
  CHECK(p1 == p2);
  CHECK(rational_to_string(p1) == rational_to_string(p2));
}

TEST_CASE("block family successiveness") {
  FinSeq b1 = FinSeq::from_entries({{1, Rational(1)}, {2, Rational(1)}});
  FinSeq b2 = FinSeq::from_entries({{3, Rational(1)}});
  CHECK(BlockFamily::successive({b1, b2}));
  CHECK(!BlockFamily::successive({b2, b1}));
  CHECK_THROWS_AS(BlockFamily({b2, b1}), std::invalid_argument);
  CHECK(!BlockFamily::successive({b1, FinSeq{}}));
  BlockFamily fam({b1, b2});
  CHECK(fam.sum().l1_norm() == Rational(3));
}

TEST_CASE("a and b of supported sequences; errors on zero") {
  FinSeq x = FinSeq::from_entries({{4, Rational(1)}, {9, Rational(-2)}});
  CHECK(x.a() == 4);
  CHECK(x.b() == 9);
  FinSeq z;
  CHECK_THROWS_AS(z.a(), std::domain_error);
}
