#pragma once
// The twisted-sum quasi-norm ||(alpha, u)|| = |alpha - Phi(u)| + ||u||_1
// over an indicator map, its n-dimensional-kernel variant over interleaved
// residue classes, and the sampled probes for the quasilinearity constant,
// the quasi-triangle ratio, and boundedness on finite subspaces.

#include <cstdint>
#include <random>
#include <vector>

#include "seqspace/factorization.hpp"
#include "seqspace/fin_seq.hpp"
#include "seqspace/spaces.hpp"

namespace seqspace {

struct TwistedVector {
  std::vector<Rational> alpha;  // size 1 for the scalar-kernel sum
  FinSeq u;

  TwistedVector() : alpha{Rational(0)} {}
  TwistedVector(Rational a, FinSeq uu) : alpha{std::move(a)}, u(std::move(uu)) {}
  TwistedVector(std::vector<Rational> a, FinSeq uu)
      : alpha(std::move(a)), u(std::move(uu)) {}
  bool is_zero() const;
};

// |alpha - Phi_X(u)| + ||u||_1 (alpha scalar).
Value quasi_norm(const TwistedVector& v, const Space& X, const SolveOpts& opts = {});

// Residue-class extraction: (S_k u)(j) = u(n(j-1) + k), k = 1..n.
FinSeq residue_class_compress(const FinSeq& u, std::uint64_t n, std::uint64_t k);

// ||xi - Phi(u)||_inf + ||u||_1 with Phi(u) = (Phi_X(S_k u))_k over the
// interleaved classes; n is the kernel dimension = alpha.size().
Value quasi_norm_multi(const TwistedVector& v, const Space& X, const SolveOpts& opts = {});

struct SampleStats {
  double max_value = 0.0;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<double> curve;  // per-trial running maxima (probes)
};

// max over sampled signed pairs of |Delta(u,v)| / (||u||_1 + ||v||_1).
SampleStats estimate_quasi_constant(const Space& X, int trials, std::uint64_t seed,
                                    std::uint64_t dim = 16, const SolveOpts& opts = {});

// max over sampled unit-l1 combinations u of span(basis) of |Phi_X(u)|.
// The flat (uniform-coefficient) combination is always included.
SampleStats probe_subspace_boundedness(const Space& X, const std::vector<FinSeq>& basis,
                                       int samples, std::uint64_t seed,
                                       const SolveOpts& opts = {});

// max of ||v1+v2|| / (||v1|| + ||v2||) over sampled twisted vectors.
SampleStats quasi_triangle_constant(const Space& X, int trials, std::uint64_t seed,
                                    std::uint64_t dim = 16, const SolveOpts& opts = {});

// Shared sampling primitive: a signed vector with Dirichlet-profile
// magnitudes normalized to ||u||_1 = 1 on indices [lo, lo+dim).
FinSeq sample_unit_l1(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t dim,
                      bool signs);

}  // namespace seqspace
