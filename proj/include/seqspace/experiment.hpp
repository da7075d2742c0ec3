#pragma once
// The end-to-end toy-scale experiment: mean-zero generators split into
// positive and negative halves, per-step defect averages with factor
// extraction, the sigma-chained form sequence over the positive parts, the
// two restricted-defect tensions, and the boundedness probe over the span of
// the generators. Only the universally valid inequalities are asserted; the
// scale-sensitive quantities are reported with their toy stamps.

#include <cstdint>
#include <memory>
#include <vector>

#include "seqspace/registry.hpp"
#include "seqspace/report.hpp"
#include "seqspace/spaces.hpp"
#include "seqspace/witnesses.hpp"

namespace seqspace {

struct ExperimentOpts {
  std::uint64_t avg_budget = 6;   // cap on per-step average lengths (stamped)
  std::uint64_t block_len = 2;    // generator half-block length
  int probe_samples = 24;
  std::uint64_t seed = 2024;
  double K_hypo = 1.0;            // hypothetical boundedness constant (reported)
  SolveOpts solve;
};

struct ExperimentResult {
  nlohmann::json report;                // full structured record
  std::vector<CheckRecord> asserted;    // universally valid inequalities
  double phi_probe = 0.0;               // boundedness probe over span{xi_i}
  bool complete = false;
};

// space_tag: z_dual (the real experiment) or l1 (closed-form cross-check).
ExperimentResult theorem51_experiment(std::shared_ptr<SigmaRegistry> registry,
                                      SpaceTag space_tag, EvalMode mode, std::uint64_t n,
                                      const ExperimentOpts& opts = {});

}  // namespace seqspace
