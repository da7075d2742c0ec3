#pragma once
// Constructive witnesses and their checkers: normalized block averages,
// rapidly-increasing average sequences, chained special sequences through
// the sigma registry, small-defect averages, the factor-block extraction,
// alternating average/ballast sequences, and the per-lemma bound evaluator.
//
// Builders are deterministic given (seed, config). Every quantity a builder
// promises is re-verifiable through the corresponding check_* routine; the
// lemma evaluator re-verifies side conditions and reports applicability
// separately from the inequality itself. In toy mode the doubly exponential
// growth requirements run with the parameter set's configured exponents and
// every report is stamped with that scaling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqspace/factorization.hpp"
#include "seqspace/fin_seq.hpp"
#include "seqspace/registry.hpp"
#include "seqspace/report.hpp"
#include "seqspace/spaces.hpp"

namespace seqspace {

// Normalized average of n successive nonnegative blocks, each of norm <= kappa.
struct AverageWitness {
  FinSeq x;            // (1/n) * sum of parts, unit norm up to tolerance
  BlockFamily parts;
  std::uint64_t n = 1;
  Rational kappa = Rational(2);
};

// Successive averages whose lengths obey the entry and chain growth bounds
// with rho = min(kappa - 1, 1).
struct RISWitness {
  std::vector<AverageWitness> xs;
  std::vector<std::uint64_t> Ms;
  Rational kappa = Rational(2);
};

// Normalized sum of a RIS family.
struct LambdaAggregate {
  RISWitness ris;
  FinSeq x;          // sum / ||sum||
  Value sum_norm;    // ||sum||_X at construction time
};

// Alternating small-defect averages w_j and ballast averages, with the
// extracted index sets and factorizations re-used by the 5.4-style checks.
struct NEpsWitness {
  std::uint64_t N = 0;
  double eps = 0.0;
  std::vector<std::uint64_t> Ms;
  std::vector<FinSeq> ws;                       // the averages
  std::vector<std::vector<FinSeq>> w_parts;     // their defect decompositions
  std::vector<Factorization> factors;           // per-average factorization
  std::vector<std::vector<Index>> As;           // extracted index sets
  std::vector<FinSeq> zs;                       // normalized restricted dual factors
  std::vector<double> z_constants;              // achieved lambda constants
  std::vector<AverageWitness> zetas;            // ballast
  bool complete = false;
  std::string trace;                            // stage log for budget failures

  nlohmann::json to_json() const;
};

nlohmann::json average_to_json(const AverageWitness& w);
AverageWitness average_from_json(const nlohmann::json& j);
nlohmann::json ris_to_json(const RISWitness& r);
RISWitness ris_from_json(const nlohmann::json& j);

struct BuildOpts {
  std::uint64_t start_index = 1;
  std::uint64_t max_block_len = 512;
  std::uint64_t max_support = 2048;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  SolveOpts solve;
};

// --- builders ---------------------------------------------------------

// Blocks of equal flat profile, lengthened until each normalized part fits
// under kappa. Throws BudgetError when the space admits no such average.
AverageWitness build_average(const Space& X, std::uint64_t n, const Rational& kappa,
                             const BuildOpts& opts = {});

RISWitness build_ris(const Space& X, std::uint64_t n, const Rational& kappa,
                     const ParamSet& params, const BuildOpts& opts = {});

LambdaAggregate build_lambda_aggregate(const Space& X, const RISWitness& ris);

// A chained special sequence of length k (k from the odd pool in toy mode):
// the first form at the level paired with k, each next at the level the
// registry assigns to its predecessors. The sequence is registered so the
// norm evaluator sees it.
SpecialSequence build_special_sequence(SigmaRegistry& registry, const Space& Z,
                                       std::uint64_t k, std::uint64_t budget,
                                       const BuildOpts& opts = {});

// Average of parts from the positive unit ball with the normalized defect.
struct GammaAverage {
  FinSeq w;
  std::vector<FinSeq> parts;
  Value delta;  // defect / n
};
GammaAverage gamma_defect(const std::vector<FinSeq>& parts, const Space& X,
                          const SolveOpts& opts = {});

// Iterated averaging until the normalized defect drops under target_delta.
struct SmallDefectResult {
  FinSeq w;
  std::vector<FinSeq> parts;    // top-level decomposition
  double delta = 0.0;
  std::vector<double> trace;    // per-depth normalized defects
  bool reached = false;
};
SmallDefectResult build_small_defect_average(const Space& X, std::uint64_t n,
                                             double target_delta, int depth_cap,
                                             const BuildOpts& opts = {});

// Factor-block extraction: from a defect average, the set A where the part
// factors stay under c times the whole factor, and the normalized restricted
// dual factor with its achieved block constant.
struct ExtractResult {
  std::vector<Index> A;
  Rational a_mass;             // ||Aw||_1
  FinSeq z;                    // A x* / ||A x*||_Z (zero if A empty)
  double achieved_constant = 0.0;
  Factorization whole;
  std::vector<Factorization> part_factors;
  bool applicable = true;
  std::string note;
};
ExtractResult extract_factor_blocks(const std::vector<FinSeq>& parts, const Space& X,
                                    double epsilon, double c = 1.1,
                                    const SolveOpts& opts = {});

NEpsWitness build_neps_sequence(const Space& X, std::uint64_t N, double eps,
                                std::uint64_t M1, SigmaRegistry& registry,
                                const BuildOpts& opts = {});

// --- checkers ---------------------------------------------------------

// Reports violation magnitude as lhs against rhs = 0.
LemmaReport check_lambda(const AverageWitness& w, const Space& X, double tol);
LemmaReport check_ris(const RISWitness& r, const Space& X, const ParamSet& params,
                      double tol);
LemmaReport check_special_sequence(const SpecialSequence& s, const SigmaRegistry& registry,
                                   const Space& Z, double tol);
LemmaReport check_neps(const NEpsWitness& w, const Space& X, const ParamSet& params,
                       double tol);

// --- lemma bound evaluation -------------------------------------------

// Inputs for the chained-sequence pairing bound: disjointly supported
// aggregates against the members of a special sequence.
struct SpecialPairingWitness {
  SpecialSequence seq;
  std::vector<LambdaAggregate> xs;   // one per selected position
  std::vector<std::size_t> A;        // selected positions (0-based, no two adjacent needed)
  Rational kappa = Rational(2);
};

struct LemmaWitness {
  std::optional<AverageWitness> average;
  std::optional<MGForm> form;
  std::optional<RISWitness> ris;
  std::optional<LambdaAggregate> aggregate;
  std::optional<SpecialPairingWitness> special;
  std::optional<NEpsWitness> neps;
  std::vector<Index> B;  // subset of the extracted A (5.4 checks)
};

// ids: "4.1", "4.2", "4.4", "4.5", "4.6", "4.7", "5.4.7", "5.4.8".
// Throws std::invalid_argument when the witness shape does not match.
LemmaReport evaluate_lemma_bound(const std::string& lemma_id, const LemmaWitness& w,
                                 const Space& X, const ParamSet& params, double tol);

// Restriction-mass trend probe on a sequence of shrinking-defect averages:
// records (delta, ||Aw||_1) pairs; nothing is asserted.
struct TrendProbe {
  std::vector<double> deltas;
  std::vector<double> masses;
};
TrendProbe probe_restriction_trend(const Space& X, std::uint64_t n, double eps,
                                   int depth_cap, const BuildOpts& opts = {});

}  // namespace seqspace
