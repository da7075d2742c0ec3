#pragma once
// Norm oracles.
//
// Four spaces share one interface: the classical l1 / linf norms (exact
// closed forms), the implicitly defined lattice norm `z` built inductively
// from scaled sums over interval decompositions plus registry-driven chained
// functionals, and `z_dual`, its Koethe dual.
//
// The z norm satisfies
//   ||x|| = max( ||x||_inf,
//                sup_{M>=2} f(M)^{-1} max over M successive interval pieces
//                      of sum_i ||E_i x||,
//                max over registered special sequences s of
//                      f(k_s)^{-1/2} sum_j <|x|, s_j> )
// and the interval-piece supremum only references strictly smaller supports,
// so a single bottom-up pass over support windows reaches the fixed point;
// the level-truncated norms stabilize there. Values in exact mode are
// certified enclosures; the point/split selection keeps the witness branch's
// lower endpoint so every certificate re-evaluates to its own value.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqspace/fin_seq.hpp"
#include "seqspace/ffunc.hpp"
#include "seqspace/params.hpp"
#include "seqspace/registry.hpp"
#include "seqspace/report.hpp"

namespace seqspace {

struct ZConfig {
  ParamSet params = ParamSet::toy_default();
  std::shared_ptr<const SigmaRegistry> registry;  // null: no special sequences
  EvalMode mode = EvalMode::floating;
  double tolerance = 1e-9;
  // Dual-norm evaluation knobs.
  int dual_restarts = 8;
  int dual_ascent_iters = 120;
  int dual_cut_rounds = 120;
  std::uint64_t seed = 2024;
  // Guards.
  std::uint64_t max_support = 4096;
  std::uint64_t witness_max_support = 512;
};

enum class SpaceTag { l1, linf, z, z_dual };
enum class CertKind { exact, lower_bound_with_gap };

// Description of a norming functional as a form tree over support-position
// windows: a charged coordinate, a scaled sum of successive pieces, or a
// registered special sequence applied to the window.
struct FormTree {
  enum class Kind { point, split, special };
  Kind kind = Kind::point;
  std::size_t pos_lo = 0, pos_hi = 0;
  Index idx = 0;                 // point: charged index
  std::uint64_t m = 0;           // split: scaling level
  std::vector<FormTree> kids;    // split: pieces
  int special = -1;              // special: registry snapshot position
};

struct NormCert {
  Value value;
  CertKind kind = CertKind::exact;
  Value gap = Value::zero();          // width of the bound when not exact
  std::optional<FormTree> witness;    // z-norm certificates
  std::optional<FinSeq> functional;   // realized norming functional (l1/linf exact)
  std::optional<FinSeq> achiever;     // dual-norm certificates: achieving unit vector
};

class Space {
 public:
  static Space l1(EvalMode mode = EvalMode::floating);
  static Space linf(EvalMode mode = EvalMode::floating);
  static Space z(ZConfig cfg);
  static Space z_dual(ZConfig cfg);

  SpaceTag tag() const { return tag_; }
  EvalMode mode() const;
  std::string name() const;
  const ZConfig& zconfig() const;  // throws for l1/linf
  bool has_zconfig() const { return tag_ == SpaceTag::z || tag_ == SpaceTag::z_dual; }
  Space dual() const;  // the Koethe-dual oracle

  NormCert norm(const FinSeq& x, bool with_witness = false) const;
  NormCert dual_norm(const FinSeq& x, bool with_witness = false) const;

  // Level-truncated evaluation of the inductive definition; level 0 is the
  // sup norm. Only meaningful for tag z.
  Value norm_level(const FinSeq& x, unsigned level) const;

  // Re-evaluates a certificate witness against x.
  Value evaluate_witness(const FormTree& w, const FinSeq& x) const;

  // Dense fast path used by the optimization loops: the norm of the vector
  // with |entries| `absval` on `support`, and a nonnegative norming
  // functional phi with <absval, phi> = norm.
  double norm_dense(const std::vector<Index>& support,
                    const std::vector<double>& absval) const;
  double norming_functional_dense(const std::vector<Index>& support,
                                  const std::vector<double>& absval,
                                  std::vector<double>& phi_out) const;

 private:
  Space(SpaceTag t, EvalMode m) : tag_(t), mode_(m) {}
  SpaceTag tag_;
  EvalMode mode_ = EvalMode::floating;
  std::shared_ptr<const ZConfig> zcfg_;
};

// Block estimates: ||sum x_i|| >= f(n)^{-1} sum ||x_i||  (lower) and
// ||sum x_i|| <= f(n) max ||x_i||  (upper). Reports use the holds <=>
// lhs <= rhs + tol convention.
LemmaReport check_lower_f_estimate(const Space& X, const BlockFamily& blocks, double tol);
LemmaReport check_upper_f_estimate(const Space& X, const BlockFamily& blocks, double tol);

}  // namespace seqspace
