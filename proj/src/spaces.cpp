#include "seqspace/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "seqspace/errors.hpp"
#include "seqspace/simplex.hpp"

namespace seqspace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DoubleOps {
  using T = double;
  static T zero() { return 0.0; }
  static T neg_inf() { return -kInf; }
  static bool is_neg_inf(T a) { return a == -kInf; }
  static T add(T a, T b) { return a + b; }
  static T sub(T a, T b) { return a - b; }
  static T mul(T a, T b) { return a * b; }
  static T from_rat(const Rational& q) { return q.get_d(); }
  static T inv_f(std::uint64_t m) { return 1.0 / f_of(m); }
  static T inv_sqrt_f(std::uint64_t m) { return 1.0 / std::sqrt(f_of(m)); }
  // Selection: strictly greater wins; join keeps the selected value.
  static bool better(T a, T b) { return a > b; }
  static T join(T sel, T other) { return std::max(sel, other); }
  static Value to_value(T a) { return Value(a); }
};

struct EncOps {
  using T = Enc;
  static T zero() { return Enc::point(0.0); }
  static T neg_inf() { return {-kInf, -kInf}; }
  static bool is_neg_inf(const T& a) { return a.hi == -kInf; }
  static T add(const T& a, const T& b) { return enc_add(a, b); }
  static T sub(const T& a, const T& b) { return enc_sub(a, b); }
  static T mul(const T& a, const T& b) { return enc_mul(a, b); }
  static T from_rat(const Rational& q) { return Enc::of_rational(q); }
  static T inv_f(std::uint64_t m) {
    return enc_div(Enc::point(1.0), f_of_enc(m));
  }
  static T inv_sqrt_f(std::uint64_t m) {
    return enc_div(Enc::point(1.0), enc_sqrt(f_of_enc(m)));
  }
  // Selection by upper endpoint; join widens the upper bound so the table
  // entry encloses the true maximum while keeping the selected branch's
  // lower endpoint (what the witness re-evaluates to).
  static bool better(const T& a, const T& b) { return a.hi > b.hi; }
  static T join(const T& sel, const T& other) {
    return {sel.lo, std::max(sel.hi, other.hi)};
  }
  static Value to_value(const T& a) { return Value(a); }
};

// Per-evaluation context and fixed-point table for the z norm.
template <class Ops>
struct ZEval {
  using T = typename Ops::T;

  std::size_t k = 0;
  std::vector<Index> pos;
  std::vector<T> mag;
  std::vector<T> finv;  // finv[m] = 1/f(m), m = 2..k
  // Special sequences: per sequence, coefficient per position and its
  // weighted prefix (window application is a prefix difference).
  std::vector<std::vector<T>> beta_coeff;
  std::vector<std::vector<T>> beta_prefix;
  std::shared_ptr<const std::vector<SpecialSequence>> specials;

  struct Dec {
    std::uint8_t kind = 0;  // 0 point, 1 split, 2 special
    std::uint32_t arg = 0;  // point: position; split: m; special: sequence id
  };
  std::vector<T> N;      // k*k, row-major [i*k+j]
  std::vector<Dec> dec;  // k*k
  bool trace = false;
  std::vector<std::uint16_t> tb;  // [((i*(k+1))+m)*k + j] -> 0 carry, else t+1

  void prepare(const FinSeq& x, const SigmaRegistry* reg) {
    FinSeq ax = x.abs();
    pos = ax.support();
    k = pos.size();
    mag.clear();
    mag.reserve(k);
    for (const auto& [j, v] : ax.entries()) mag.push_back(Ops::from_rat(v));
    finv.assign(k + 1, Ops::zero());
    for (std::size_t m = 2; m <= k; ++m) finv[m] = Ops::inv_f(m);
    beta_coeff.clear();
    beta_prefix.clear();
    if (reg) {
      specials = reg->specials();
      for (const auto& s : *specials) {
        std::vector<T> coeff(k, Ops::zero());
        T scale = Ops::inv_sqrt_f(s.k);
        for (const auto& form : s.forms) {
          T lvl = Ops::inv_f(form.level);
          T w = Ops::mul(scale, lvl);
          for (const auto& blk : form.parts.blocks()) {
            for (const auto& [j, v] : blk.entries()) {
              auto it = std::lower_bound(pos.begin(), pos.end(), j);
              if (it != pos.end() && *it == j) {
                std::size_t p = static_cast<std::size_t>(it - pos.begin());
                coeff[p] = Ops::add(coeff[p], Ops::mul(w, Ops::from_rat(v)));
              }
            }
          }
        }
        std::vector<T> prefix(k + 1, Ops::zero());
        for (std::size_t p = 0; p < k; ++p)
          prefix[p + 1] = Ops::add(prefix[p], Ops::mul(coeff[p], mag[p]));
        beta_coeff.push_back(std::move(coeff));
        beta_prefix.push_back(std::move(prefix));
      }
    }
  }

  T beta_window(std::size_t s, std::size_t i, std::size_t j) const {
    return Ops::sub(beta_prefix[s][j + 1], beta_prefix[s][i]);
  }

  // Bottom-up fixed point over support windows. Rows run right to left so a
  // window only consumes strictly narrower windows.
  void run() {
    N.assign(k * k, Ops::zero());
    dec.assign(k * k, Dec{});
    if (trace) tb.assign(k * (k + 1) * k, 0);
    if (k == 0) return;
    std::vector<std::vector<T>> G(k + 1, std::vector<T>(k, Ops::neg_inf()));
    for (std::size_t ii = k; ii-- > 0;) {
      const std::size_t i = ii;
      for (auto& row : G) std::fill(row.begin(), row.end(), Ops::neg_inf());
      T point_best = Ops::neg_inf();
      std::uint32_t point_arg = 0;
      for (std::size_t j = i; j < k; ++j) {
        // Scaled-sum candidates: m pieces, the last one ending exactly at j
        // or the column carried from j-1.
        std::size_t width = j - i + 1;
        for (std::size_t m = 2; m <= width; ++m) {
          T best = Ops::neg_inf();
          std::uint16_t code = 0;
          if (j > i && !Ops::is_neg_inf(G[m][j - 1])) {
            best = G[m][j - 1];
            code = 0;
          }
          for (std::size_t t = i + 1; t <= j; ++t) {
            const T& pre = G[m - 1][t - 1];
            if (Ops::is_neg_inf(pre)) continue;
            T cand = Ops::add(pre, N[t * k + j]);
            if (Ops::is_neg_inf(best) || Ops::better(cand, best)) {
              if (Ops::is_neg_inf(best)) {
                best = cand;
              } else {
                best = Ops::join(cand, best);
              }
              code = static_cast<std::uint16_t>(t + 1);
            } else {
              best = Ops::join(best, cand);
            }
          }
          G[m][j] = best;
          if (trace) tb[((i * (k + 1)) + m) * k + j] = code;
        }
        // Window value: charged point, scaled sums, special sequences.
        if (Ops::is_neg_inf(point_best) || Ops::better(mag[j], point_best)) {
          point_best = Ops::is_neg_inf(point_best) ? mag[j] : Ops::join(mag[j], point_best);
          point_arg = static_cast<std::uint32_t>(j);
        } else {
          point_best = Ops::join(point_best, mag[j]);
        }
        T val = point_best;
        Dec d{0, point_arg};
        for (std::size_t m = 2; m <= width; ++m) {
          if (Ops::is_neg_inf(G[m][j])) continue;
          T cand = Ops::mul(finv[m], G[m][j]);
          if (Ops::better(cand, val)) {
            val = Ops::join(cand, val);
            d = Dec{1, static_cast<std::uint32_t>(m)};
          } else {
            val = Ops::join(val, cand);
          }
        }
        for (std::size_t s = 0; s < beta_prefix.size(); ++s) {
          T cand = beta_window(s, i, j);
          if (Ops::better(cand, val)) {
            val = Ops::join(cand, val);
            d = Dec{2, static_cast<std::uint32_t>(s)};
          } else {
            val = Ops::join(val, cand);
          }
        }
        N[i * k + j] = val;
        dec[i * k + j] = d;
        // Single-piece table entry (prefix for later columns), now that the
        // full window's own value exists.
        T g1 = (j > i) ? G[1][j - 1] : Ops::neg_inf();
        std::uint16_t code1 = 0;
        for (std::size_t t = i; t <= j; ++t) {
          const T& cand = N[t * k + j];
          if (Ops::is_neg_inf(g1) || Ops::better(cand, g1)) {
            g1 = Ops::is_neg_inf(g1) ? cand : Ops::join(cand, g1);
            code1 = static_cast<std::uint16_t>(t + 1);
          } else {
            g1 = Ops::join(g1, cand);
          }
        }
        G[1][j] = g1;
        if (trace) tb[((i * (k + 1)) + 1) * k + j] = code1;
      }
    }
  }

  T value() const { return k ? N[k - 1] : Ops::zero(); }

  FormTree build_tree(std::size_t i, std::size_t j) const {
    const Dec& d = dec[i * k + j];
    FormTree node;
    node.pos_lo = i;
    node.pos_hi = j;
    if (d.kind == 0) {
      node.kind = FormTree::Kind::point;
      node.idx = pos[d.arg];
      node.pos_lo = node.pos_hi = d.arg;
    } else if (d.kind == 2) {
      node.kind = FormTree::Kind::special;
      node.special = static_cast<int>(d.arg);
    } else {
      node.kind = FormTree::Kind::split;
      node.m = d.arg;
      std::size_t m = d.arg, jj = j;
      std::vector<std::pair<std::size_t, std::size_t>> pieces;
      while (m >= 1) {
        std::uint16_t code = tb[((i * (k + 1)) + m) * k + jj];
        if (code == 0) {
          if (jj == i) break;
          --jj;
          continue;
        }
        std::size_t t = static_cast<std::size_t>(code - 1);
        pieces.emplace_back(t, jj);
        --m;
        if (t == i) break;
        jj = t - 1;
      }
      std::reverse(pieces.begin(), pieces.end());
      for (auto [lo, hi] : pieces) node.kids.push_back(build_tree(lo, hi));
    }
    return node;
  }

  // Accumulates the realized functional coefficients of a tree into phi.
  void realize(const FormTree& node, const T& scale, std::vector<T>& phi) const {
    switch (node.kind) {
      case FormTree::Kind::point:
        phi[node.pos_lo] = Ops::add(phi[node.pos_lo], scale);
        break;
      case FormTree::Kind::special: {
        const auto& coeff = beta_coeff[static_cast<std::size_t>(node.special)];
        for (std::size_t p = node.pos_lo; p <= node.pos_hi; ++p)
          phi[p] = Ops::add(phi[p], Ops::mul(scale, coeff[p]));
        break;
      }
      case FormTree::Kind::split: {
        T s = Ops::mul(scale, node.m <= k ? finv[node.m] : Ops::inv_f(node.m));
        for (const auto& kid : node.kids) realize(kid, s, phi);
        break;
      }
    }
  }

  // Re-evaluates a tree with the table's own arithmetic.
  T eval_tree(const FormTree& node) const {
    switch (node.kind) {
      case FormTree::Kind::point:
        return mag[node.pos_lo];
      case FormTree::Kind::special:
        return beta_window(static_cast<std::size_t>(node.special), node.pos_lo, node.pos_hi);
      case FormTree::Kind::split: {
        T sum = Ops::zero();
        for (const auto& kid : node.kids) sum = Ops::add(sum, eval_tree(kid));
        return Ops::mul(node.m <= k ? finv[node.m] : Ops::inv_f(node.m), sum);
      }
    }
    return Ops::zero();
  }
};

template <class Ops>
ZEval<Ops> make_eval(const FinSeq& x, const ZConfig& cfg, bool trace) {
  ZEval<Ops> ev;
  ev.trace = trace;
  ev.prepare(x, cfg.registry.get());
  if (ev.k > cfg.max_support)
    throw BudgetError("z norm: support " + std::to_string(ev.k) + " exceeds cap " +
                      std::to_string(cfg.max_support));
  if (trace && ev.k > cfg.witness_max_support)
    throw BudgetError("z norm: witness extraction above support cap");
  ev.run();
  return ev;
}

// Dense double evaluation for optimization loops (no FinSeq round trip).
struct DenseZ {
  ZEval<DoubleOps> ev;
  const ZConfig* cfg;
  std::vector<Index> support;

  void prepare_from(const std::vector<Index>& sup, const ZConfig& c) {
    cfg = &c;
    support = sup;
    FinSeq probe;  // positions/coefficient tables depend only on the support
    for (Index j : sup) probe.set(j, Rational(1));
    ev.trace = true;
    ev.prepare(probe, c.registry.get());
  }

  double eval(const std::vector<double>& absval, std::vector<double>* phi) {
    ev.mag.assign(absval.begin(), absval.end());
    // Refresh the beta prefixes for the new magnitudes.
    for (std::size_t s = 0; s < ev.beta_coeff.size(); ++s) {
      auto& prefix = ev.beta_prefix[s];
      for (std::size_t p = 0; p < ev.k; ++p)
        prefix[p + 1] = prefix[p] + ev.beta_coeff[s][p] * ev.mag[p];
    }
    ev.run();
    double v = ev.k ? ev.value() : 0.0;
    if (phi) {
      phi->assign(ev.k, 0.0);
      if (ev.k) {
        FormTree t = ev.build_tree(0, ev.k - 1);
        ev.realize(t, 1.0, *phi);
      }
    }
    return v;
  }
};

std::string space_name(SpaceTag t) {
  switch (t) {
    case SpaceTag::l1: return "l1";
    case SpaceTag::linf: return "linf";
    case SpaceTag::z: return "z";
    case SpaceTag::z_dual: return "z_dual";
  }
  return "?";
}

}  // namespace

Space Space::l1(EvalMode mode) { return Space(SpaceTag::l1, mode); }
Space Space::linf(EvalMode mode) { return Space(SpaceTag::linf, mode); }
Space Space::z(ZConfig cfg) {
  Space s(SpaceTag::z, cfg.mode);
  s.zcfg_ = std::make_shared<const ZConfig>(std::move(cfg));
  return s;
}
Space Space::z_dual(ZConfig cfg) {
  Space s(SpaceTag::z_dual, cfg.mode);
  s.zcfg_ = std::make_shared<const ZConfig>(std::move(cfg));
  return s;
}

EvalMode Space::mode() const { return mode_; }
std::string Space::name() const { return space_name(tag_); }

const ZConfig& Space::zconfig() const {
  if (!zcfg_) throw std::logic_error("space has no z configuration");
  return *zcfg_;
}

Space Space::dual() const {
  switch (tag_) {
    case SpaceTag::l1: return linf(mode_);
    case SpaceTag::linf: return l1(mode_);
    case SpaceTag::z: {
      Space s(SpaceTag::z_dual, mode_);
      s.zcfg_ = zcfg_;
      return s;
    }
    case SpaceTag::z_dual: {
      Space s(SpaceTag::z, mode_);
      s.zcfg_ = zcfg_;
      return s;
    }
  }
  throw std::logic_error("bad tag");
}

namespace {

NormCert l1_cert(const FinSeq& x) {
  NormCert c;
  c.value = Value(x.l1_norm());
  c.kind = CertKind::exact;
  FinSeq phi;
  for (const auto& [j, v] : x.entries()) phi.set(j, Rational(1));
  c.functional = phi;
  return c;
}

NormCert linf_cert(const FinSeq& x) {
  NormCert c;
  c.value = Value(x.linf_norm());
  c.kind = CertKind::exact;
  if (!x.is_zero()) {
    Rational m = x.linf_norm();
    for (const auto& [j, v] : x.entries()) {
      if (abs(v) == m) {  // lowest achieving index
        c.functional = FinSeq::unit(j);
        break;
      }
    }
  }
  return c;
}

}  // namespace

NormCert Space::norm(const FinSeq& x, bool with_witness) const {
  switch (tag_) {
    case SpaceTag::l1: return l1_cert(x);
    case SpaceTag::linf: return linf_cert(x);
    case SpaceTag::z_dual: return dual().dual_norm(x, with_witness);
    case SpaceTag::z: break;
  }
  const ZConfig& cfg = zconfig();
  NormCert c;
  if (x.is_zero()) {
    c.value = Value(Rational(0));
    return c;
  }
  if (mode_ == EvalMode::exact) {
    auto ev = make_eval<EncOps>(x, cfg, with_witness);
    Enc v = ev.value();
    c.value = Value(v);
    c.kind = CertKind::exact;
    c.gap = Value(Rational(0));
    if (with_witness) c.witness = ev.build_tree(0, ev.k - 1);
  } else {
    auto ev = make_eval<DoubleOps>(x, cfg, with_witness);
    c.value = Value(ev.value());
    c.kind = CertKind::exact;
    c.gap = Value(0.0);
    if (with_witness) c.witness = ev.build_tree(0, ev.k - 1);
  }
  return c;
}

Value Space::norm_level(const FinSeq& x, unsigned level) const {
  if (tag_ != SpaceTag::z) throw std::invalid_argument("norm_level: oracle must be tagged z");
  if (x.is_zero()) return Value(Rational(0));
  const ZConfig& cfg = zconfig();
  if (mode_ == EvalMode::exact) {
    ZEval<EncOps> ev;
    ev.prepare(x, cfg.registry.get());
    const std::size_t k = ev.k;
    std::vector<Enc> cur(k * k), nxt(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      Enc m = ev.mag[i];
      cur[i * k + i] = m;
      for (std::size_t j = i + 1; j < k; ++j)
        cur[i * k + j] = enc_max(cur[i * k + j - 1], ev.mag[j]);
    }
    std::vector<std::vector<Enc>> G(k + 1, std::vector<Enc>(k));
    for (unsigned L = 0; L < level; ++L) {
      for (std::size_t i = 0; i < k; ++i) {
        for (auto& row : G) std::fill(row.begin(), row.end(), EncOps::neg_inf());
        for (std::size_t j = i; j < k; ++j) {
          for (std::size_t m = 1; m <= j - i + 1; ++m) {
            Enc best = (j > i) ? G[m][j - 1] : EncOps::neg_inf();
            for (std::size_t t = (m == 1 ? i : i + 1); t <= j; ++t) {
              if (m >= 2 && EncOps::is_neg_inf(G[m - 1][t - 1])) continue;
              Enc cand = cur[t * k + j];
              if (m >= 2) cand = enc_add(G[m - 1][t - 1], cand);
              best = EncOps::is_neg_inf(best) ? cand : enc_max(best, cand);
            }
            G[m][j] = best;
          }
          Enc val = cur[i * k + j];
          for (std::size_t m = 2; m <= j - i + 1; ++m) {
            if (EncOps::is_neg_inf(G[m][j])) continue;
            val = enc_max(val, enc_mul(ev.finv[m], G[m][j]));
          }
          for (std::size_t s = 0; s < ev.beta_prefix.size(); ++s)
            val = enc_max(val, ev.beta_window(s, i, j));
          nxt[i * k + j] = val;
        }
      }
      cur.swap(nxt);
    }
    return Value(cur[k - 1]);
  }
  ZEval<DoubleOps> ev;
  ev.prepare(x, cfg.registry.get());
  const std::size_t k = ev.k;
  std::vector<double> cur(k * k, 0.0), nxt(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    cur[i * k + i] = ev.mag[i];
    for (std::size_t j = i + 1; j < k; ++j)
      cur[i * k + j] = std::max(cur[i * k + j - 1], ev.mag[j]);
  }
  std::vector<std::vector<double>> G(k + 1, std::vector<double>(k, -kInf));
  for (unsigned L = 0; L < level; ++L) {
    for (std::size_t i = 0; i < k; ++i) {
      for (auto& row : G) std::fill(row.begin(), row.end(), -kInf);
      for (std::size_t j = i; j < k; ++j) {
        for (std::size_t m = 1; m <= j - i + 1; ++m) {
          double best = (j > i) ? G[m][j - 1] : -kInf;
          for (std::size_t t = (m == 1 ? i : i + 1); t <= j; ++t) {
            double pre = (m >= 2) ? G[m - 1][t - 1] : 0.0;
            if (pre == -kInf) continue;
            best = std::max(best, pre + cur[t * k + j]);
          }
          G[m][j] = best;
        }
        double val = cur[i * k + j];
        for (std::size_t m = 2; m <= j - i + 1; ++m)
          if (G[m][j] != -kInf) val = std::max(val, ev.finv[m] * G[m][j]);
        for (std::size_t s = 0; s < ev.beta_prefix.size(); ++s)
          val = std::max(val, ev.beta_window(s, i, j));
        nxt[i * k + j] = val;
      }
    }
    cur.swap(nxt);
  }
  return Value(cur[k - 1]);
}

Value Space::evaluate_witness(const FormTree& w, const FinSeq& x) const {
  if (tag_ != SpaceTag::z) throw std::invalid_argument("evaluate_witness: z oracles only");
  const ZConfig& cfg = zconfig();
  if (mode_ == EvalMode::exact) {
    ZEval<EncOps> ev;
    ev.prepare(x, cfg.registry.get());
    return Value(ev.eval_tree(w));
  }
  ZEval<DoubleOps> ev;
  ev.prepare(x, cfg.registry.get());
  return Value(ev.eval_tree(w));
}

double Space::norm_dense(const std::vector<Index>& support,
                         const std::vector<double>& absval) const {
  switch (tag_) {
    case SpaceTag::l1: {
      double s = 0;
      for (double v : absval) s += v;
      return s;
    }
    case SpaceTag::linf: {
      double m = 0;
      for (double v : absval) m = std::max(m, v);
      return m;
    }
    case SpaceTag::z: {
      DenseZ dz;
      dz.prepare_from(support, zconfig());
      dz.ev.trace = false;
      return dz.eval(absval, nullptr);
    }
    case SpaceTag::z_dual: {
      std::vector<double> phi;
      return norming_functional_dense(support, absval, phi);
    }
  }
  return 0;
}

namespace {

struct DualDense {
  double lb = 0.0;
  double ub = kInf;
  std::vector<double> z;
  bool converged = false;
  int rounds = 0;
};

DualDense dual_norm_dense(const std::vector<Index>& support,
                          const std::vector<double>& absx, const ZConfig& cfg) {
  const std::size_t n = support.size();
  DualDense out;
  out.z.assign(n, 0.0);
  if (n == 0) {
    out.ub = 0.0;
    out.converged = true;
    return out;
  }
  DenseZ dz;
  dz.prepare_from(support, cfg);

  double l1 = 0.0, linf = 0.0;
  for (double v : absx) {
    l1 += v;
    linf = std::max(linf, v);
  }
  const double gap_target = cfg.tolerance * std::max(1.0, l1);

  std::vector<std::vector<double>> rows;
  auto add_row = [&](const std::vector<double>& phi) {
    for (const auto& r : rows) {
      double d = 0.0;
      for (std::size_t p = 0; p < n; ++p) d = std::max(d, std::fabs(r[p] - phi[p]));
      if (d < 1e-12) return;
    }
    rows.push_back(phi);
  };

  // Stage 1: projected subgradient ascent of <x,z>/||z|| with radial
  // retraction; collects active norming functionals as cutting rows.
  std::vector<double> zv(n), phi(n), best_z(n, 0.0);
  double best = 0.0;
  const double step0 = 0.5 / std::max(linf, 1e-30);
  for (int r = 0; r < std::max(1, cfg.dual_restarts); ++r) {
    std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ull * (r + 1));
    if (r == 0) {
      zv = absx;  // deterministic start along the target
    } else {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& v : zv) v = u(rng) + 1e-3;
    }
    for (int it = 0; it < cfg.dual_ascent_iters; ++it) {
      double nrm = dz.eval(zv, &phi);
      if (!(nrm > 0)) break;
      for (auto& v : zv) v /= nrm;  // radial retraction to the unit sphere
      double g = 0.0;
      for (std::size_t p = 0; p < n; ++p) g += absx[p] * zv[p];
      if (g > best) {
        best = g;
        best_z = zv;
      }
      if ((it & 7) == 0) add_row(phi);
      double eta = step0 / std::sqrt(1.0 + it);
      for (std::size_t p = 0; p < n; ++p) {
        zv[p] += eta * (absx[p] - g * phi[p]);
        if (zv[p] < 0) zv[p] = 0;
      }
    }
    add_row(phi);
  }
  out.lb = best;
  out.z = best_z;

  // Stage 2: cutting-plane refinement. Box rows z_p <= 1 are always valid
  // (unit coordinate functionals); each violated certificate functional cuts
  // the current LP point. The LP value upper-bounds the dual norm.
  for (int round = 0; round < cfg.dual_cut_rounds; ++round) {
    out.rounds = round;
    std::vector<std::vector<double>> A;
    A.reserve(rows.size() + n);
    std::vector<double> b;
    for (std::size_t p = 0; p < n; ++p) {
      std::vector<double> e(n, 0.0);
      e[p] = 1.0;
      A.push_back(std::move(e));
      b.push_back(1.0);
    }
    for (const auto& rrow : rows) {
      A.push_back(rrow);
      b.push_back(1.0);
    }
    LpResult lp = solve_lp_max(A, b, absx);
    if (!lp.optimal) break;
    out.ub = std::min(out.ub, lp.value);
    double nrm = dz.eval(lp.z, &phi);
    if (nrm > 0) {
      double g = 0.0;
      for (std::size_t p = 0; p < n; ++p) g += absx[p] * lp.z[p];
      g /= std::max(1.0, nrm);
      if (g > out.lb) {
        out.lb = g;
        out.z = lp.z;
        if (nrm > 1.0)
          for (auto& v : out.z) v /= nrm;
      }
    }
    if (out.ub - out.lb <= gap_target) {
      out.converged = true;
      break;
    }
    if (nrm <= 1.0 + 1e-12) {
      // LP point already feasible: bounds agree up to LP tolerance.
      out.converged = out.ub - out.lb <= std::max(gap_target, 1e-9 * std::max(1.0, out.ub));
      break;
    }
    std::size_t before = rows.size();
    add_row(phi);
    if (rows.size() == before) break;  // cut not new; no further progress
  }
  if (out.ub < out.lb) out.ub = out.lb;
  return out;
}

}  // namespace

double Space::norming_functional_dense(const std::vector<Index>& support,
                                       const std::vector<double>& absval,
                                       std::vector<double>& phi_out) const {
  switch (tag_) {
    case SpaceTag::l1: {
      phi_out.assign(absval.size(), 1.0);
      double s = 0;
      for (double v : absval) s += v;
      return s;
    }
    case SpaceTag::linf: {
      phi_out.assign(absval.size(), 0.0);
      std::size_t arg = 0;
      for (std::size_t p = 1; p < absval.size(); ++p)
        if (absval[p] > absval[arg]) arg = p;
      if (!absval.empty()) phi_out[arg] = 1.0;
      return absval.empty() ? 0.0 : absval[arg];
    }
    case SpaceTag::z: {
      DenseZ dz;
      dz.prepare_from(support, zconfig());
      return dz.eval(absval, &phi_out);
    }
    case SpaceTag::z_dual: {
      DualDense d = dual_norm_dense(support, absval, zconfig());
      phi_out = d.z;
      return d.lb;
    }
  }
  return 0;
}

NormCert Space::dual_norm(const FinSeq& x, bool with_witness) const {
  switch (tag_) {
    case SpaceTag::l1: return linf(mode_).norm(x, with_witness);
    case SpaceTag::linf: return l1(mode_).norm(x, with_witness);
    case SpaceTag::z_dual: {
      // Koethe bidual: the lattice has the Fatou property, so the dual of
      // the dual norm is the original z norm.
      Space zs(SpaceTag::z, mode_);
      zs.zcfg_ = zcfg_;
      return zs.norm(x, with_witness);
    }
    case SpaceTag::z: break;
  }
  const ZConfig& cfg = zconfig();
  NormCert c;
  if (x.is_zero()) {
    c.value = Value(Rational(0));
    return c;
  }
  FinSeq ax = x.abs();
  std::vector<Index> support = ax.support();
  std::vector<double> absx;
  absx.reserve(support.size());
  for (const auto& [j, v] : ax.entries()) absx.push_back(v.get_d());
  DualDense d = dual_norm_dense(support, absx, cfg);

  // Achieving vector, signed to match x.
  FinSeq z;
  for (std::size_t p = 0; p < support.size(); ++p) {
    if (d.z[p] <= 0) continue;
    Rational v = rational_from_double(d.z[p]);
    if (sgn(x.at(support[p])) < 0) v = -v;
    z.set(support[p], v);
  }
  c.achiever = z;
  if (mode_ == EvalMode::exact && !z.is_zero()) {
    // Certified lower bound from the achiever: <x,z> / max(1, ||z||).
    Rational pr = pairing(x, z);
    auto ev = make_eval<EncOps>(z, cfg, false);
    Enc nz = enc_max(Enc::point(1.0), ev.value());
    Enc lbe = enc_div(Enc::of_rational(pr), nz);
    c.value = Value(lbe);
    double gap = std::max(0.0, d.ub - lbe.lo);
    c.gap = Value(gap);
    c.kind = (d.converged && gap <= cfg.tolerance * std::max(1.0, d.ub))
                 ? CertKind::exact
                 : CertKind::lower_bound_with_gap;
  } else {
    c.value = Value(d.lb);
    c.gap = Value(std::max(0.0, d.ub - d.lb));
    c.kind = d.converged ? CertKind::exact : CertKind::lower_bound_with_gap;
  }
  return c;
}

LemmaReport check_lower_f_estimate(const Space& X, const BlockFamily& blocks, double tol) {
  const std::size_t n = blocks.size();
  Value sum_norms = Value::zero();
  for (const auto& blk : blocks.blocks()) sum_norms = sum_norms + X.norm(blk).value;
  Value whole = X.norm(blocks.sum()).value;
  Value fn = growth_eval_value(GrowthTag::f, Rational(static_cast<unsigned long>(n)),
                               X.mode());
  LemmaReport r = LemmaReport::of("lower_f_estimate", sum_norms / fn, whole, tol);
  r.note = "space=" + X.name() + " n=" + std::to_string(n);
  return r;
}

LemmaReport check_upper_f_estimate(const Space& X, const BlockFamily& blocks, double tol) {
  const std::size_t n = blocks.size();
  Value max_norm = Value::zero();
  for (const auto& blk : blocks.blocks()) max_norm = vmax(max_norm, X.norm(blk).value);
  Value whole = X.norm(blocks.sum()).value;
  Value fn = growth_eval_value(GrowthTag::f, Rational(static_cast<unsigned long>(n)),
                               X.mode());
  LemmaReport r = LemmaReport::of("upper_f_estimate", whole, fn * max_norm, tol);
  r.note = "space=" + X.name() + " n=" + std::to_string(n);
  return r;
}

}  // namespace seqspace
