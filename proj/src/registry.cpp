#include "seqspace/registry.hpp"

#include <fstream>

#include "seqspace/errors.hpp"
#include "seqspace/report.hpp"

namespace seqspace {

MGForm::MGForm(BlockFamily p, std::uint64_t lvl, GrowthTag gt)
    : parts(std::move(p)), level(lvl), g(gt) {
  if (level < 2) throw std::invalid_argument("MGForm: level must be >= 2");
  if (parts.size() == 0) throw std::invalid_argument("MGForm: needs at least one part");
  if (parts.size() > level)
    throw std::invalid_argument("MGForm: more parts than the level admits");
  for (const auto& blk : parts.blocks())
    if (!blk.is_nonneg()) throw std::invalid_argument("MGForm: parts must be nonnegative");
}

Value MGForm::pair_with(const FinSeq& x, EvalMode mode) const {
  Rational s(0);
  for (const auto& blk : parts.blocks()) s += pairing(x, blk);
  Value scale = growth_eval_value(g, Rational(static_cast<unsigned long>(level)), mode);
  return Value(s) / scale;
}

std::string MGForm::serialize() const {
  std::string out = "m=" + std::to_string(level) + ";g=";
  out += (g == GrowthTag::f) ? "f" : "sqrt_f";
  out += ";parts=[";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "|";
    const auto& blk = parts[i];
    bool first = true;
    for (const auto& [j, v] : blk.entries()) {
      if (!first) out += ",";
      first = false;
      out += std::to_string(j) + ":" + rational_to_string(v);
    }
  }
  out += "]";
  return out;
}

nlohmann::json MGForm::to_json() const {
  nlohmann::json j;
  j["level"] = level;
  j["g"] = (g == GrowthTag::f) ? "f" : "sqrt_f";
  nlohmann::json parts_j = nlohmann::json::array();
  for (const auto& blk : parts.blocks()) {
    nlohmann::json bj = nlohmann::json::array();
    for (const auto& [idx, v] : blk.entries()) {
      bj.push_back({{"index", idx},
                    {"num", v.get_num().get_str()},
                    {"den", v.get_den().get_str()}});
    }
    parts_j.push_back(bj);
  }
  j["parts"] = parts_j;
  return j;
}

MGForm MGForm::from_json(const nlohmann::json& j) {
  std::uint64_t level = j.at("level").get<std::uint64_t>();
  GrowthTag g = j.at("g").get<std::string>() == "sqrt_f" ? GrowthTag::sqrt_f : GrowthTag::f;
  std::vector<FinSeq> blocks;
  for (const auto& bj : j.at("parts")) {
    std::vector<std::pair<Index, Rational>> entries;
    for (const auto& ej : bj) {
      Rational v(mpz_class(ej.at("num").get<std::string>()),
                 mpz_class(ej.at("den").get<std::string>()));
      v.canonicalize();
      entries.emplace_back(ej.at("index").get<Index>(), v);
    }
    blocks.push_back(FinSeq::from_entries(std::move(entries)));
  }
  return MGForm(BlockFamily(std::move(blocks)), level, g);
}

std::string serialize_tuple(const std::vector<MGForm>& forms) {
  std::string s;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (i) s += "&";
    s += forms[i].serialize();
  }
  return s;
}

nlohmann::json SpecialSequence::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["levels"] = levels;
  j["toy_admissible"] = toy_admissible;
  nlohmann::json fj = nlohmann::json::array();
  for (const auto& f : forms) fj.push_back(f.to_json());
  j["forms"] = fj;
  return j;
}

SpecialSequence SpecialSequence::from_json(const nlohmann::json& j) {
  SpecialSequence s;
  s.k = j.at("k").get<std::uint64_t>();
  s.levels = j.at("levels").get<std::vector<std::uint64_t>>();
  s.toy_admissible = j.value("toy_admissible", true);
  for (const auto& fj : j.at("forms")) s.forms.push_back(MGForm::from_json(fj));
  return s;
}

SigmaRegistry::SigmaRegistry(ParamSet params)
    : params_(std::move(params)),
      specials_(std::make_shared<const std::vector<SpecialSequence>>()) {
  params_.validate();
}

std::uint64_t SigmaRegistry::sigma_encode(const std::vector<MGForm>& tuple) {
  if (tuple.empty()) throw std::invalid_argument("sigma_encode: empty tuple");
  for (std::size_t i = 0; i + 1 < tuple.size(); ++i)
    if (!(tuple[i].last_index() < tuple[i + 1].first_index()))
      throw std::invalid_argument("sigma_encode: forms must be in block order");
  std::string key = serialize_tuple(tuple);
  std::lock_guard<std::mutex> lk(*mu_);
  auto it = assign_.find(key);
  if (it != assign_.end()) return it->second;

  Index b_last = tuple.back().last_index();
  Rational expo = params_.sigma_exp() * Rational(static_cast<unsigned long>(b_last)) *
                  Rational(static_cast<unsigned long>(b_last));
  for (std::uint64_t cand : params_.p2()) {
    if (used_.count(cand)) continue;
    if (geq_pow2(Rational(static_cast<unsigned long>(cand)), expo)) {
      assign_.emplace(std::move(key), cand);
      used_.insert(cand);
      return cand;
    }
  }
  throw BudgetError("sigma_encode: even parameter pool exhausted (need >= 2^" +
                    rational_to_string(expo) + ")");
}

std::optional<std::uint64_t> SigmaRegistry::sigma_lookup(
    const std::vector<MGForm>& tuple) const {
  std::lock_guard<std::mutex> lk(*mu_);
  auto it = assign_.find(serialize_tuple(tuple));
  if (it == assign_.end()) return std::nullopt;
  return it->second;
}

std::size_t SigmaRegistry::assignment_count() const {
  std::lock_guard<std::mutex> lk(*mu_);
  return assign_.size();
}

void SigmaRegistry::register_special(SpecialSequence s) {
  std::lock_guard<std::mutex> lk(*mu_);
  auto next = std::make_shared<std::vector<SpecialSequence>>(*specials_);
  next->push_back(std::move(s));
  specials_ = std::move(next);
}

std::shared_ptr<const std::vector<SpecialSequence>> SigmaRegistry::specials() const {
  std::lock_guard<std::mutex> lk(*mu_);
  return specials_;
}

nlohmann::json SigmaRegistry::to_json() const {
  std::lock_guard<std::mutex> lk(*mu_);
  nlohmann::json j;
  j["params"] = params_.to_json();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [key, val] : assign_) {
    arr.push_back({{"tuple_digest", fnv1a_hex(key)},
                   {"serialized_forms", key},
                   {"assigned_p", val}});
  }
  j["assignments"] = arr;
  nlohmann::json sp = nlohmann::json::array();
  for (const auto& s : *specials_) sp.push_back(s.to_json());
  j["specials"] = sp;
  return j;
}

SigmaRegistry SigmaRegistry::from_json(const nlohmann::json& j) {
  SigmaRegistry reg(ParamSet::from_json(j.at("params")));
  for (const auto& a : j.at("assignments")) {
    std::string key = a.at("serialized_forms").get<std::string>();
    std::uint64_t val = a.at("assigned_p").get<std::uint64_t>();
    if (a.contains("tuple_digest") &&
        a["tuple_digest"].get<std::string>() != fnv1a_hex(key))
      throw ParseError("registry: tuple_digest mismatch");
    if (reg.used_.count(val)) throw ParseError("registry: duplicate assigned_p");
    reg.assign_.emplace(key, val);
    reg.used_.insert(val);
  }
  if (j.contains("specials")) {
    auto sp = std::make_shared<std::vector<SpecialSequence>>();
    for (const auto& s : j["specials"]) sp->push_back(SpecialSequence::from_json(s));
    reg.specials_ = std::move(sp);
  }
  return reg;
}

void SigmaRegistry::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write registry: " + path);
  out << to_json().dump(2) << "\n";
}

SigmaRegistry SigmaRegistry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read registry: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

}  // namespace seqspace
