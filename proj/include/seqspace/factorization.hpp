#pragma once
// Lattice factorization u = x . x* through the positive unit ball of a
// space, the indicator functional Phi_X(u) = <u, log x>, and the defect
// Delta(u_1..u_n) = sum Phi(u_i) - Phi(sum u_i), together with the checked
// inequalities that mention them.
//
// The factor x solves max <u, log x> over the positive unit ball (a concave
// program); the solver is a multiplicative ascent in log coordinates driven
// by the space's norming functionals, with radial retraction to the unit
// sphere. For the dual of z the factorization is obtained from the z-side
// one by exchanging the roles of factor and functional, which lands on the
// same optimum without nesting two ascents.

#include <cstdint>
#include <optional>
#include <vector>

#include "seqspace/fin_seq.hpp"
#include "seqspace/report.hpp"
#include "seqspace/spaces.hpp"

namespace seqspace {

struct SolveOpts {
  int max_iters = 4000;
  double kkt_rtol = 1e-10;   // stop when ||u - S phi x||_1 <= rtol * S
  int restarts = 1;
  std::uint64_t seed = 1;
  bool certify = true;       // evaluate ||x*||_{X*} for the duality gap
  bool force_direct = false; // run the generic ascent even on the dual space
  double floor_val = 1e-30;  // entries of x on supp(u) never drop below this
};

struct Factorization {
  FinSeq u;
  FinSeq x;        // factor, ||x||_X <= 1 (up to tolerance), > 0 on supp u
  FinSeq xstar;    // u / x pointwise
  Value phi;       // <u, log x>
  Value duality_gap;
  bool dual_checked = false;  // whether ||x*||_{X*} entered the gap
  int iterations = 0;
  std::uint64_t seed = 0;
};

Factorization factorize(const FinSeq& u, const Space& X, const SolveOpts& opts = {});

// Phi_X(u); signed u is paired against the factor of |u|. Phi_X(0) = 0.
Value indicator(const FinSeq& u, const Space& X, const SolveOpts& opts = {});

// sum_j u(j) log x(j) for signed u, x > 0 on supp u.
Value signed_log_pairing(const FinSeq& u, const FinSeq& x, EvalMode mode);

struct DefectReport {
  std::vector<FinSeq> parts;
  Value delta;
  std::vector<Value> per_part_phi;
  Value sum_phi;
  Value whole_phi;
  Value entropy_bound;  // sum ||u_i||_1 log(S / ||u_i||_1)
};

DefectReport defect(const std::vector<FinSeq>& parts, const Space& X,
                    const SolveOpts& opts = {});

// |Delta(u,v)| <= (4/e)(||u||_1 + ||v||_1).
LemmaReport check_quasilinearity_bound(const FinSeq& u, const FinSeq& v, const Space& X,
                                       double tol, const SolveOpts& opts = {});

// Two-sided defect bound under restriction by an index set A, for u in the
// positive l1 ball split into successive parts. Returns {lower, upper}.
std::pair<LemmaReport, LemmaReport> check_restricted_defect(
    const std::vector<FinSeq>& parts, const std::vector<Index>& A, const Space& X,
    double tol, const SolveOpts& opts = {});

// Delta(u_1..u_n) <= log f(n) * sum ||u_i||_1 on successive nonnegative
// blocks over spaces with the upper f-estimate.
LemmaReport check_block_defect_bound(const std::vector<FinSeq>& parts, const Space& X,
                                     double tol, const SolveOpts& opts = {});

// Near-optimal factors: Phi_X(u) - <u, log x> <= ||u||_1 log(1/||u||_1)
// whenever ||u||_1 <= 1, u = x x*, x and x* in the respective unit balls.
LemmaReport check_near_optimal_factor(const FinSeq& u, const FinSeq& x, const Space& X,
                                      double tol, const SolveOpts& opts = {});

// Split additivity of the two-mass entropy expression:
//   sum_i [s_i log((s_i+t_i)/s_i) + t_i log((s_i+t_i)/t_i)]
//     <= S log((S+T)/S) + T log((S+T)/T),  zero terms when a factor vanishes.
LemmaReport check_split_additivity(const std::vector<Rational>& s,
                                   const std::vector<Rational>& t, EvalMode mode,
                                   double tol);

}  // namespace seqspace
