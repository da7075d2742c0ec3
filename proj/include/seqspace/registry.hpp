#pragma once
// Scaled-sum dual functionals ((m,g)-forms), chained special sequences, and
// the persistent injective sigma coding of form tuples into the even
// parameter pool. The registry is the single source of special sequences the
// norm evaluator's chained part enumerates.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqspace/fin_seq.hpp"
#include "seqspace/ffunc.hpp"
#include "seqspace/params.hpp"

#include <json.hpp>

namespace seqspace {

// An (m,g)-form: value functional g(level)^{-1} (x_1^* + ... + x_s^*) with
// successive nonnegative rational parts, s <= level. Parts are kept verbatim;
// the irrational scaling is applied at evaluation time. At toy scale forms
// may be degenerate (fewer parts than the level): a degenerate form is
// dominated by the form of its own part count, so admitting it never
// enlarges the evaluated norm.
struct MGForm {
  BlockFamily parts;
  std::uint64_t level = 2;
  GrowthTag g = GrowthTag::f;

  MGForm() = default;
  MGForm(BlockFamily parts, std::uint64_t level, GrowthTag g = GrowthTag::f);

  Index first_index() const { return parts[0].a(); }
  Index last_index() const { return parts[parts.size() - 1].b(); }
  // <x, form> for x >= 0, i.e. g(level)^{-1} sum of part pairings.
  Value pair_with(const FinSeq& x, EvalMode mode) const;
  // Canonical serialization: level, tag, then per part the sorted
  // index:num/den entries. Equal forms serialize equally.
  std::string serialize() const;
  nlohmann::json to_json() const;
  static MGForm from_json(const nlohmann::json& j);
};

std::string serialize_tuple(const std::vector<MGForm>& forms);

// A chained sequence of rational forms: the first at the level paired to k,
// each later one at the level the sigma coding assigned to its predecessors.
// k is the length parameter used in the f(k)^{-1/2} scaling.
struct SpecialSequence {
  std::vector<MGForm> forms;
  std::uint64_t k = 0;
  std::vector<std::uint64_t> levels;
  bool toy_admissible = true;  // k drawn from the odd pool?

  nlohmann::json to_json() const;
  static SpecialSequence from_json(const nlohmann::json& j);
};

class SigmaRegistry {
 public:
  explicit SigmaRegistry(ParamSet params);

  const ParamSet& params() const { return params_; }

  // Deterministic injection: the canonical serialization of the tuple maps to
  // the smallest unassigned even-pool element meeting the growth bound
  // (assigned >= 2^(sigma_exp * b(last)^2)). Repeat calls return the same
  // value; pool exhaustion throws BudgetError.
  std::uint64_t sigma_encode(const std::vector<MGForm>& tuple);
  std::optional<std::uint64_t> sigma_lookup(const std::vector<MGForm>& tuple) const;
  std::size_t assignment_count() const;

  void register_special(SpecialSequence s);
  // Stable snapshot for concurrent readers (norm evaluation).
  std::shared_ptr<const std::vector<SpecialSequence>> specials() const;

  nlohmann::json to_json() const;
  static SigmaRegistry from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static SigmaRegistry load(const std::string& path);

 private:
  mutable std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  ParamSet params_;
  std::map<std::string, std::uint64_t> assign_;  // serialization -> pool value
  std::set<std::uint64_t> used_;
  std::shared_ptr<const std::vector<SpecialSequence>> specials_;
};

}  // namespace seqspace
