#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "seqspace/ffunc.hpp"
#include "seqspace/simplex.hpp"

namespace seqspace::oracle {

NormingSet::NormingSet(std::size_t k, std::vector<std::vector<double>> betas)
    : k_(k), betas_(std::move(betas)) {
  if (k_ > 8) throw std::invalid_argument("NormingSet: enumeration capped at 8 positions");
  cache_.resize(k_ * k_);
  if (k_ == 0) return;
  all_ = window(0, k_ - 1);
}

const std::vector<std::vector<double>>& NormingSet::window(std::size_t i, std::size_t j) {
  if (cached_[i][j]) return cache_[i * k_ + j];
  cached_[i][j] = true;
  std::vector<std::vector<double>> out;
  // Unit functionals.
  for (std::size_t p = i; p <= j; ++p) {
    std::vector<double> e(k_, 0.0);
    e[p] = 1.0;
    out.push_back(std::move(e));
  }
  // Windowed special-sequence coefficient vectors.
  for (const auto& beta : betas_) {
    std::vector<double> v(k_, 0.0);
    for (std::size_t p = i; p <= j; ++p) v[p] = beta[p];
    out.push_back(std::move(v));
  }
  // Scaled sums over >= 2 successive pieces, all part counts, all piece
  // functionals. compose() appends the scaled vectors.
  std::vector<double> sum(k_, 0.0);
  compose(i, j, i, 0, sum, out);
  // Dedup.
  std::map<std::vector<long long>, std::size_t> seen;
  std::vector<std::vector<double>> dedup;
  for (auto& v : out) {
    std::vector<long long> key(k_);
    for (std::size_t p = 0; p < k_; ++p) key[p] = llround(v[p] * 1e12);
    if (seen.emplace(std::move(key), dedup.size()).second) dedup.push_back(std::move(v));
  }
  cache_[i * k_ + j] = std::move(dedup);
  return cache_[i * k_ + j];
}

void NormingSet::compose(std::size_t /*i*/, std::size_t j, std::size_t start,
                         std::size_t count, std::vector<double>& sum,
                         std::vector<std::vector<double>>& out) {
  if (count >= 2) {
    if (out.size() > 4'000'000) throw std::runtime_error("NormingSet: enumeration blow-up");
    double scale = 1.0 / f_of(count);
    std::vector<double> v(k_);
    for (std::size_t p = 0; p < k_; ++p) v[p] = scale * sum[p];
    out.push_back(std::move(v));
  }
  for (std::size_t s = start; s <= j; ++s) {
    for (std::size_t e = s; e <= j; ++e) {
      for (const auto& piece : window(s, e)) {
        for (std::size_t p = 0; p < k_; ++p) sum[p] += piece[p];
        compose(0, j, e + 1, count + 1, sum, out);
        for (std::size_t p = 0; p < k_; ++p) sum[p] -= piece[p];
      }
    }
  }
}

double NormingSet::norm(const std::vector<double>& absval) const {
  double best = 0.0;
  for (const auto& phi : all_) {
    double v = 0.0;
    for (std::size_t p = 0; p < k_; ++p) v += phi[p] * absval[p];
    best = std::max(best, v);
  }
  return best;
}

double NormingSet::dual_norm(const std::vector<double>& xval) const {
  if (k_ == 0) return 0.0;
  std::vector<std::vector<double>> rows;
  std::vector<double> b;
  for (std::size_t p = 0; p < k_; ++p) {
    std::vector<double> e(k_, 0.0);
    e[p] = 1.0;
    rows.push_back(std::move(e));
    b.push_back(1.0);
  }
  for (int round = 0; round < 400; ++round) {
    LpResult lp = solve_lp_max(rows, b, xval);
    if (!lp.optimal) throw std::runtime_error("oracle LP did not converge");
    // Exact separation: scan the whole enumerated set.
    double worst = 0.0;
    std::size_t arg = 0;
    for (std::size_t r = 0; r < all_.size(); ++r) {
      double v = 0.0;
      for (std::size_t p = 0; p < k_; ++p) v += all_[r][p] * lp.z[p];
      if (v > worst) {
        worst = v;
        arg = r;
      }
    }
    if (worst <= 1.0 + 1e-10) return lp.value;
    rows.push_back(all_[arg]);
    b.push_back(1.0);
  }
  throw std::runtime_error("oracle LP separation did not terminate");
}

double l1_indicator_closed(const FinSeq& u) {
  if (u.is_zero()) return 0.0;
  double S = u.l1_norm().get_d();
  double acc = 0.0;
  for (const auto& [j, v] : u.entries()) {
    double d = v.get_d();
    acc += d * std::log(std::fabs(d) / S);
  }
  return acc;
}

FinSeq l1_factor_closed(const FinSeq& u) {
  Rational S = u.l1_norm();
  return u.abs().scaled(Rational(1) / S);
}

double linf_indicator_closed(const FinSeq&) { return 0.0; }

double grid_factor_objective_dim2(const FinSeq& u, const Space& X, int steps) {
  if (u.support_size() != 2 || !u.is_nonneg())
    throw std::invalid_argument("grid_factor_objective_dim2: need nonneg support 2");
  auto sup = u.support();
  double u1 = u.at(sup[0]).get_d(), u2 = u.at(sup[1]).get_d();
  double best = -1e300;
  for (int s = 1; s < steps; ++s) {
    double t = static_cast<double>(s) / steps;
    FinSeq dir;
    dir.set(sup[0], rational_from_double(t));
    dir.set(sup[1], rational_from_double(1.0 - t));
    double nrm = X.norm(dir).value.approx();
    if (!(nrm > 0)) continue;
    best = std::max(best, u1 * std::log(t / nrm) + u2 * std::log((1.0 - t) / nrm));
  }
  return best;
}

FinSeq random_nonneg(std::mt19937_64& rng, Index lo, std::uint64_t dim, double density) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  FinSeq s;
  bool any = false;
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (u01(rng) > density) continue;
    double v = u01(rng);
    if (v < 1e-9) continue;
    s.set(lo + i, rational_from_double(v));
    any = true;
  }
  if (!any) s.set(lo, Rational(1, 2));
  return s;
}

FinSeq random_signed(std::mt19937_64& rng, Index lo, std::uint64_t dim, double density) {
  FinSeq s = random_nonneg(rng, lo, dim, density);
  FinSeq out;
  for (const auto& [j, v] : s.entries()) out.set(j, (rng() & 1) ? v : Rational(-v));
  return out;
}

std::vector<FinSeq> random_successive_blocks(std::mt19937_64& rng, std::size_t count,
                                             std::uint64_t block_dim, Index lo) {
  std::vector<FinSeq> blocks;
  Index cur = lo;
  std::uniform_int_distribution<std::uint64_t> len(1, block_dim);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t L = len(rng);
    blocks.push_back(random_nonneg(rng, cur, L));
    cur = blocks.back().b() + 1 + (rng() % 2);
  }
  return blocks;
}

}  // namespace seqspace::oracle
