#include "seqspace/fin_seq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqspace {

Interval::Interval(Index l, Index h) : lo(l), hi(h) {
  if (l < 1 || l > h) throw std::invalid_argument("Interval: need 1 <= lo <= hi");
}

FinSeq FinSeq::unit(Index i) {
  FinSeq s;
  s.set(i, Rational(1));
  return s;
}

FinSeq FinSeq::from_entries(std::vector<std::pair<Index, Rational>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  FinSeq s;
  for (auto& [j, v] : entries) {
    if (j < 1) throw std::invalid_argument("FinSeq: indices are 1-based");
    if (!s.entries_.empty() && s.entries_.back().first == j)
      throw std::invalid_argument("FinSeq: duplicate index");
    if (sgn(v) != 0) {
      v.canonicalize();
      s.entries_.emplace_back(j, std::move(v));
    }
  }
  return s;
}

Index FinSeq::a() const {
  if (is_zero()) throw std::domain_error("a(x): x = 0");
  return entries_.front().first;
}
Index FinSeq::b() const {
  if (is_zero()) throw std::domain_error("b(x): x = 0");
  return entries_.back().first;
}

Rational FinSeq::at(Index j) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                             [](const auto& e, Index k) { return e.first < k; });
  if (it != entries_.end() && it->first == j) return it->second;
  return Rational(0);
}

void FinSeq::set(Index j, const Rational& v) {
  if (j < 1) throw std::invalid_argument("FinSeq: indices are 1-based");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                             [](const auto& e, Index k) { return e.first < k; });
  if (it != entries_.end() && it->first == j) {
    if (sgn(v) == 0)
      entries_.erase(it);
    else
      it->second = v;
  } else if (sgn(v) != 0) {
    entries_.insert(it, {j, v});
  }
}

std::vector<Index> FinSeq::support() const {
  std::vector<Index> s;
  s.reserve(entries_.size());
  for (const auto& [j, v] : entries_) s.push_back(j);
  return s;
}

FinSeq FinSeq::operator+(const FinSeq& o) const {
  FinSeq r;
  r.entries_.reserve(entries_.size() + o.entries_.size());
  auto i = entries_.begin();
  auto j = o.entries_.begin();
  while (i != entries_.end() || j != o.entries_.end()) {
    if (j == o.entries_.end() || (i != entries_.end() && i->first < j->first)) {
      r.entries_.push_back(*i++);
    } else if (i == entries_.end() || j->first < i->first) {
      r.entries_.push_back(*j++);
    } else {
      Rational v = i->second + j->second;
      if (sgn(v) != 0) r.entries_.emplace_back(i->first, std::move(v));
      ++i;
      ++j;
    }
  }
  return r;
}

FinSeq FinSeq::operator-(const FinSeq& o) const { return *this + o.scaled(Rational(-1)); }

FinSeq FinSeq::scaled(const Rational& c) const {
  FinSeq r;
  if (sgn(c) == 0) return r;
  r.entries_.reserve(entries_.size());
  for (const auto& [j, v] : entries_) r.entries_.emplace_back(j, Rational(v * c));
  return r;
}

FinSeq FinSeq::abs() const {
  FinSeq r;
  r.entries_.reserve(entries_.size());
  for (const auto& [j, v] : entries_) r.entries_.emplace_back(j, Rational(::abs(v)));
  return r;
}

FinSeq FinSeq::pointwise_mul(const FinSeq& o) const {
  FinSeq r;
  auto i = entries_.begin();
  auto j = o.entries_.begin();
  while (i != entries_.end() && j != o.entries_.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      r.entries_.emplace_back(i->first, Rational(i->second * j->second));
      ++i;
      ++j;
    }
  }
  return r;
}

FinSeq FinSeq::pointwise_div_on_support(const FinSeq& x) const {
  FinSeq r;
  for (const auto& [j, v] : entries_) {
    Rational d = x.at(j);
    if (sgn(d) == 0) throw std::domain_error("pointwise division by zero on support");
    r.entries_.emplace_back(j, Rational(v / d));
  }
  return r;
}

Rational FinSeq::l1_norm() const {
  Rational s(0);
  for (const auto& [j, v] : entries_) s += ::abs(v);
  return s;
}

Rational FinSeq::linf_norm() const {
  Rational m(0);
  for (const auto& [j, v] : entries_) {
    Rational av = ::abs(v);
    if (av > m) m = av;
  }
  return m;
}

Rational FinSeq::mass() const {
  Rational s(0);
  for (const auto& [j, v] : entries_) s += v;
  return s;
}

bool FinSeq::is_nonneg() const {
  for (const auto& [j, v] : entries_)
    if (sgn(v) < 0) return false;
  return true;
}

FinSeq restrict(const std::vector<Index>& A, const FinSeq& x) {
  FinSeq r;
  for (const auto& [j, v] : x.entries()) {
    if (std::binary_search(A.begin(), A.end(), j)) r.set(j, v);
  }
  return r;
}

FinSeq restrict(const Interval& E, const FinSeq& x) {
  FinSeq r;
  for (const auto& [j, v] : x.entries())
    if (E.contains(j)) r.set(j, v);
  return r;
}

FinSeq restrict_complement(const std::vector<Index>& A, const FinSeq& x) {
  FinSeq r;
  for (const auto& [j, v] : x.entries())
    if (!std::binary_search(A.begin(), A.end(), j)) r.set(j, v);
  return r;
}

Rational pairing(const FinSeq& x, const FinSeq& y) {
  Rational s(0);
  auto i = x.entries().begin();
  auto j = y.entries().begin();
  while (i != x.entries().end() && j != y.entries().end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

std::optional<Value> log_pairing(const FinSeq& u, const FinSeq& v, EvalMode mode) {
  if (!u.is_nonneg() || !v.is_nonneg())
    throw std::domain_error("log_pairing: entries must be nonnegative");
  Value acc = Value::zero();
  for (const auto& [j, uj] : u.entries()) {
    Rational vj = v.at(j);
    if (sgn(vj) == 0) return std::nullopt;  // u(j) > 0, v(j) = 0 forces -infinity
    if (mode == EvalMode::exact)
      acc = acc + Value(uj) * Value(log_enc(vj));
    else
      acc = acc + Value(uj.get_d() * std::log(vj.get_d()));
  }
  return acc;
}

Value entropy_phi(const Rational& t, EvalMode mode) {
  if (sgn(t) < 0 || t > 1) throw std::domain_error("entropy_phi: t outside [0,1]");
  Rational one_t = 1 - t;
  Value acc = Value::zero();
  auto term = [&](const Rational& s) -> Value {
    if (sgn(s) == 0) return Value::zero();  // 0 log 0 = 0
    if (mode == EvalMode::exact) return Value(s) * Value(log_enc(Rational(1 / s)));
    return Value(s.get_d() * std::log(1.0 / s.get_d()));
  };
  return term(t) + term(one_t);
}

std::pair<FinSeq, FinSeq> split_pos_neg(const FinSeq& xi) {
  FinSeq p, q;
  for (const auto& [j, v] : xi.entries()) {
    if (sgn(v) > 0)
      p.set(j, v);
    else
      q.set(j, Rational(-v));
  }
  return {p, q};
}

bool BlockFamily::successive(const std::vector<FinSeq>& blocks) {
  for (const auto& blk : blocks)
    if (blk.is_zero()) return false;
  for (std::size_t i = 0; i + 1 < blocks.size(); ++i)
    if (!(blocks[i].b() < blocks[i + 1].a())) return false;
  return true;
}

BlockFamily::BlockFamily(std::vector<FinSeq> blocks) : blocks_(std::move(blocks)) {
  if (!successive(blocks_))
    throw std::invalid_argument("BlockFamily: blocks must be nonzero and successive");
}

FinSeq BlockFamily::sum() const {
  FinSeq s;
  for (const auto& blk : blocks_) s = s + blk;
  return s;
}

}  // namespace seqspace
