#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <map>
#include <random>

#include "seqspace/errors.hpp"
#include "seqspace/registry.hpp"

using namespace seqspace;

namespace {
MGForm simple_form(Index start, std::uint64_t level, int parts,
                   Rational v = Rational(1, 2)) {
  std::vector<FinSeq> blocks;
  for (int i = 0; i < parts; ++i)
    blocks.push_back(FinSeq::from_entries({{start + static_cast<Index>(i), v}}));
  return MGForm(BlockFamily(std::move(blocks)), level);
}
}  // namespace

TEST_CASE("pow2 comparison is exact") {
  CHECK(geq_pow2(Rational(16), Rational(4)));
  CHECK(!geq_pow2(Rational(15), Rational(4)));
  CHECK(geq_pow2(Rational(3), Rational(3, 2)));  // 3 >= 2^1.5 = 2.828...
  CHECK(!geq_pow2(Rational(2), Rational(3, 2)));
  CHECK(geq_pow2(Rational(1, 2), Rational(-1)));
  CHECK(!geq_pow2(Rational(1, 3), Rational(-1)));
}

TEST_CASE("toy parameter validation") {
  ParamSet ps = ParamSet::toy_default();
  CHECK_NOTHROW(ps.validate());
  CHECK(ps.p1().front() == 4);
  CHECK(ps.p2().front() == 9);
  CHECK(ps.in_p1(4));
  CHECK(!ps.in_p1(9));

  ParamSet bad = ps;
  bad.p[2] = 24;  // not a square
  CHECK_THROWS_AS(bad.validate(), ParseError);
  bad = ps;
  bad.p[3] = bad.p[2];  // not increasing
  CHECK_THROWS_AS(bad.validate(), ParseError);
}

TEST_CASE("paper parameters validate symbolically and are not materializable") {
  ParamSet ps = ParamSet::paper_default();
  CHECK_NOTHROW(ps.validate());
  CHECK_THROWS_AS(ps.p_at(1), BudgetError);
  CHECK(!ps.in_p1(4));
}

TEST_CASE("paramset json round trip") {
  ParamSet ps = ParamSet::toy_default();
  nlohmann::json j = ps.to_json();
  ParamSet back = ParamSet::from_json(j);
  CHECK(back.p == ps.p);
  CHECK(back.sigma_exponent == ps.sigma_exponent);
  CHECK(back.to_json() == j);

  nlohmann::json missing = {{"mode", "toy"}};
  CHECK_THROWS_WITH_AS(ParamSet::from_json(missing), doctest::Contains("params.p"),
                       ParseError);
}

TEST_CASE("sigma coding: stability, injectivity, growth rule") {
  ParamSet ps = ParamSet::toy_default();
  ps.sigma_exponent = Rational(1);  // growth 2^(b^2)
  ps.p = {4, 16, 25, 36, 49, 64};   // even pool {16, 36, 64}
  SigmaRegistry reg(ps);

  // b(last) = 2 with exponent 1 forces assigned >= 2^4 = 16.
  auto tuple = std::vector<MGForm>{simple_form(1, 3, 2)};
  CHECK(tuple[0].last_index() == 2);
  std::uint64_t v = reg.sigma_encode(tuple);
  CHECK(v == 16);
  CHECK(reg.sigma_encode(tuple) == 16);  // same tuple, same value
  auto tuple2 = std::vector<MGForm>{simple_form(1, 3, 2, Rational(1, 3))};
  std::uint64_t v2 = reg.sigma_encode(tuple2);
  CHECK(v2 == 36);  // distinct tuple, distinct value
  // pool exhaustion
  auto tuple3 = std::vector<MGForm>{simple_form(1, 3, 2, Rational(1, 5))};
  CHECK(reg.sigma_encode(tuple3) == 64);
  auto tuple4 = std::vector<MGForm>{simple_form(1, 3, 2, Rational(1, 7))};
  CHECK_THROWS_AS(reg.sigma_encode(tuple4), BudgetError);
}

TEST_CASE("sigma coding is injective over many random tuples and survives reload") {
  ParamSet ps;
  ps.mode = ParamSet::Mode::toy;
  ps.sigma_exponent = Rational(1, 4096);
  ps.ris_exponent = Rational(1, 16);
  // Large even pool so thousands of assignments fit.
  for (std::uint64_t i = 2; ps.p.size() < 2400; ++i) ps.p.push_back(i * i);
  SigmaRegistry reg(ps);

  std::mt19937_64 rng(5);
  std::map<std::string, std::uint64_t> seen;
  std::map<std::uint64_t, std::string> by_value;
  int distinct = 0;
  for (int t = 0; t < 1000; ++t) {
    int parts = 1 + static_cast<int>(rng() % 3);
    Rational val(1 + static_cast<long>(rng() % 97), 1 + static_cast<long>(rng() % 53));
    if (val > 1) val = 1 / val;
    std::vector<MGForm> tuple{simple_form(1 + (rng() % 5), 4, parts, val)};
    std::string key = serialize_tuple(tuple);
    std::uint64_t v = reg.sigma_encode(tuple);
    auto it = seen.find(key);
    if (it != seen.end()) {
      CHECK(it->second == v);  // function property
    } else {
      seen.emplace(key, v);
      auto [jt, fresh] = by_value.emplace(v, key);
      CHECK(fresh);  // injectivity
      ++distinct;
    }
  }
  CHECK(distinct > 100);

  // Persistence round trip: same assignments, and new calls keep old values.
  std::string path = "/tmp/seqspace_registry_test.json";
  reg.save(path);
  SigmaRegistry back = SigmaRegistry::load(path);
  CHECK(back.assignment_count() == reg.assignment_count());
  std::vector<MGForm> probe{simple_form(2, 4, 2, Rational(1, 97))};
  CHECK(back.sigma_encode(probe) == reg.sigma_encode(probe));
  std::remove(path.c_str());
}

TEST_CASE("special sequences round trip through the registry json") {
  ParamSet ps = ParamSet::toy_default();
  SigmaRegistry reg(ps);
  SpecialSequence s;
  s.k = 4;
  s.levels = {81, 9};
  s.forms = {simple_form(1, 81, 2), simple_form(10, 9, 2)};
  reg.register_special(s);
  CHECK(reg.specials()->size() == 1);

  nlohmann::json j = reg.to_json();
  SigmaRegistry back = SigmaRegistry::from_json(j);
  REQUIRE(back.specials()->size() == 1);
  const SpecialSequence& b = back.specials()->at(0);
  CHECK(b.k == 4);
  CHECK(b.levels == std::vector<std::uint64_t>{81, 9});
  CHECK(serialize_tuple(b.forms) == serialize_tuple(s.forms));
}

TEST_CASE("mgform rejects bad shapes") {
  CHECK_THROWS_AS(simple_form(1, 1, 1), std::invalid_argument);           // level < 2
  CHECK_THROWS_AS(simple_form(1, 2, 3), std::invalid_argument);           // parts > level
  FinSeq neg = FinSeq::from_entries({{1, Rational(-1)}});
  CHECK_THROWS_AS(MGForm(BlockFamily({neg}), 2), std::invalid_argument);  // negative part
}
