#pragma once
// Finitely supported sequences over 1-based indices, and the lattice /
// pairing operations the rest of the library is built from. Entries are
// exact rationals; only nonzero entries are stored.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "seqspace/scalar.hpp"

namespace seqspace {

using Index = std::uint64_t;

// Closed index interval [lo, hi], lo >= 1.
struct Interval {
  Index lo = 1;
  Index hi = 1;
  Interval() = default;
  Interval(Index l, Index h);
  bool contains(Index j) const { return lo <= j && j <= hi; }
};

class FinSeq {
 public:
  FinSeq() = default;
  static FinSeq unit(Index i);  // e_i
  static FinSeq from_entries(std::vector<std::pair<Index, Rational>> entries);

  bool is_zero() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }
  Index a() const;  // min support; requires nonzero
  Index b() const;  // max support; requires nonzero

  Rational at(Index j) const;  // 0 off support
  void set(Index j, const Rational& v);

  const std::vector<std::pair<Index, Rational>>& entries() const { return entries_; }
  std::vector<Index> support() const;

  FinSeq operator+(const FinSeq& o) const;
  FinSeq operator-(const FinSeq& o) const;
  FinSeq scaled(const Rational& c) const;
  FinSeq abs() const;
  FinSeq pointwise_mul(const FinSeq& o) const;
  // Pointwise u/x on the support of *this; requires x nonzero there.
  FinSeq pointwise_div_on_support(const FinSeq& x) const;

  bool operator==(const FinSeq& o) const { return entries_ == o.entries_; }

  Rational l1_norm() const;
  Rational linf_norm() const;
  Rational mass() const;  // plain sum of entries
  bool is_nonneg() const;

 private:
  // Sorted by index; values nonzero and canonical.
  std::vector<std::pair<Index, Rational>> entries_;
};

// x restricted to an index set / interval: (Ax)(j) = x(j) for j in A.
FinSeq restrict(const std::vector<Index>& A, const FinSeq& x);
FinSeq restrict(const Interval& E, const FinSeq& x);
// Complement restriction within the support of x.
FinSeq restrict_complement(const std::vector<Index>& A, const FinSeq& x);

// <x,y> = sum x(j) y(j); exact.
Rational pairing(const FinSeq& x, const FinSeq& y);

// <u, log v> with 0 log 0 = 0; u,v >= 0. nullopt encodes -infinity
// (some u(j) > 0 where v(j) = 0).
std::optional<Value> log_pairing(const FinSeq& u, const FinSeq& v, EvalMode mode);

// phi(t) = t log(1/t) + (1-t) log(1/(1-t)) on [0,1]; phi(0)=phi(1)=0.
Value entropy_phi(const Rational& t, EvalMode mode);

// xi = p - q with p,q >= 0 of disjoint support.
std::pair<FinSeq, FinSeq> split_pos_neg(const FinSeq& xi);

// Successive blocks: b(block_i) < a(block_{i+1}); all blocks nonzero.
class BlockFamily {
 public:
  BlockFamily() = default;
  explicit BlockFamily(std::vector<FinSeq> blocks);  // validates
  static bool successive(const std::vector<FinSeq>& blocks);
  const std::vector<FinSeq>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const FinSeq& operator[](std::size_t i) const { return blocks_[i]; }
  FinSeq sum() const;

 private:
  std::vector<FinSeq> blocks_;
};

}  // namespace seqspace
