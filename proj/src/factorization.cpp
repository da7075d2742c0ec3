#include "seqspace/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "seqspace/errors.hpp"

namespace seqspace {

Value signed_log_pairing(const FinSeq& u, const FinSeq& x, EvalMode mode) {
  Value acc = Value::zero();
  for (const auto& [j, uj] : u.entries()) {
    Rational xj = x.at(j);
    if (sgn(xj) <= 0) throw std::domain_error("signed_log_pairing: factor not positive");
    if (mode == EvalMode::exact)
      acc = acc + Value(uj) * Value(log_enc(xj));
    else
      acc = acc + Value(uj.get_d() * std::log(xj.get_d()));
  }
  return acc;
}

namespace {

// Multiplicative ascent for max <u, log x> on the unit sphere of X.
// Stationarity is u = S (phi . x) with phi norming x and S = ||u||_1; each
// iteration moves x in log coordinates toward the point that satisfies it,
// with backtracking on the objective. The functional is averaged across
// iterations so the direction settles inside the subdifferential hull at
// kinks of the norm.
struct AscentResult {
  std::vector<double> x;
  double objective = -1e300;
  int iterations = 0;
};

AscentResult ascend(const Space& X, const std::vector<Index>& support,
                    const std::vector<double>& uval, const SolveOpts& opts,
                    std::uint64_t seed) {
  const std::size_t n = support.size();
  double S = 0.0;
  for (double v : uval) S += v;

  std::vector<double> x(n, 1.0), phi(n), phibar(n), cand(n), cphi(n), step(n);
  std::mt19937_64 rng(seed);
  if (seed != 0) {
    std::uniform_real_distribution<double> u01(0.25, 1.0);
    for (auto& v : x) v = u01(rng);
  }
  double nrm = X.norming_functional_dense(support, x, phi);
  for (auto& v : x) v /= nrm;  // phi also norms the retracted point
  phibar = phi;

  auto objective = [&](const std::vector<double>& xx) {
    double o = 0.0;
    for (std::size_t p = 0; p < n; ++p) o += uval[p] * std::log(std::max(xx[p], opts.floor_val));
    return o;
  };

  AscentResult best;
  best.x = x;
  best.objective = objective(x);
  double obj = best.objective;
  double gamma = 1.0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    double resid = 0.0;
    for (std::size_t p = 0; p < n; ++p) resid += std::fabs(uval[p] - S * phibar[p] * x[p]);
    if (resid <= opts.kkt_rtol * S) break;
    for (std::size_t p = 0; p < n; ++p) {
      double target = S * phibar[p] * x[p];
      if (target > 1e-300 && uval[p] > 0) {
        step[p] = std::clamp(std::log(uval[p] / target), -3.0, 3.0);
      } else if (uval[p] > 0) {
        step[p] = 2.0;  // coordinate the functional does not yet see
      } else {
        step[p] = -1.0;
      }
    }
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t p = 0; p < n; ++p)
        cand[p] = std::max(x[p] * std::exp(gamma * step[p]), opts.floor_val);
      double cn = X.norming_functional_dense(support, cand, cphi);
      if (!(cn > 0)) break;
      for (auto& v : cand) v /= cn;
      double cobj = objective(cand);
      if (cobj >= obj - 1e-15 * std::fabs(obj)) {
        x = cand;
        obj = cobj;
        for (std::size_t p = 0; p < n; ++p) phibar[p] = 0.5 * phibar[p] + 0.5 * cphi[p];
        if (cobj > best.objective) {
          best.objective = cobj;
          best.x = x;
        }
        gamma = std::min(1.0, gamma * 1.3);
        accepted = true;
        break;
      }
      gamma *= 0.5;
      if (gamma < 1e-13) break;
    }
    if (!accepted) break;
  }
  best.iterations = it;
  return best;
}

// Active-set refinement. The ball constraint is relaxed to finitely many
// collected norming functionals <phi_i, x> <= 1; the relaxed program has the
// smooth Lagrangian dual
//   g(lambda) = sum_i lambda_i + sum_j u_j log(u_j / m_j) - S,
//   m = sum_i lambda_i phi_i,   x(lambda)_j = u_j / m_j,
// minimized by projected gradient. Any lambda >= 0 gives a certified upper
// bound for the true maximum; a violated certificate functional of x(lambda)
// becomes a new row. Terminates because the norming set is finite.
struct RefineResult {
  std::vector<double> x;
  double objective = -1e300;
  double upper = 1e300;
  int rounds = 0;
};

RefineResult refine(const Space& X, const std::vector<Index>& support,
                    const std::vector<double>& uval,
                    const std::vector<double>& x_init, const SolveOpts& opts) {
  const std::size_t n = support.size();
  double S = 0.0;
  for (double v : uval) S += v;

  std::vector<std::vector<double>> rows;
  std::vector<double> lam;
  auto add_row = [&](const std::vector<double>& phi) {
    for (const auto& r : rows) {
      double d = 0.0;
      for (std::size_t p = 0; p < n; ++p) d = std::max(d, std::fabs(r[p] - phi[p]));
      if (d < 1e-13) return;
    }
    rows.push_back(phi);
    lam.push_back(0.0);
  };
  for (std::size_t p = 0; p < n; ++p) {  // unit rows cover every coordinate
    std::vector<double> e(n, 0.0);
    e[p] = 1.0;
    rows.push_back(std::move(e));
    lam.push_back(uval[p]);
  }

  auto eval_g = [&](const std::vector<double>& l, std::vector<double>& m) -> double {
    m.assign(n, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (l[i] == 0.0) continue;
      for (std::size_t p = 0; p < n; ++p) m[p] += l[i] * rows[i][p];
    }
    double g = -S;
    for (double li : l) g += li;
    for (std::size_t p = 0; p < n; ++p) {
      if (!(m[p] > 0.0)) return 1e300;
      g += uval[p] * std::log(uval[p] / m[p]);
    }
    return g;
  };

  RefineResult out;
  out.x = x_init;
  {
    double o = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      o += uval[p] * std::log(std::max(x_init[p], opts.floor_val));
    out.objective = o;
  }

  std::vector<double> m(n), phi(n);
  const double gap_target = std::max(1e-11, 1e-10 * std::max(1.0, S));
  for (int round = 0; round < 60; ++round) {
    out.rounds = round;
    // Inner minimization of g by cyclic coordinate Newton; m is kept
    // incrementally and must stay positive on supp(u).
    double g = eval_g(lam, m);
    if (g >= 1e300) {  // lost coverage: restore the unit rows
      for (std::size_t p = 0; p < n; ++p) lam[p] = std::max(lam[p], uval[p]);
      g = eval_g(lam, m);
    }
    for (int sweep = 0; sweep < 300; ++sweep) {
      double worst = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double dot = 0.0, hess = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
          if (rows[i][p] == 0.0 || uval[p] == 0.0) continue;
          double r = rows[i][p] / m[p];
          dot += r * uval[p];
          hess += r * r * uval[p];
        }
        double gi = 1.0 - dot;
        if (lam[i] == 0.0 && gi >= 0.0) continue;
        if (!(hess > 0.0)) continue;
        double move = -gi / hess;
        if (lam[i] + move < 0.0) move = -lam[i];
        // keep m positive wherever u charges a coordinate
        for (int bt = 0; bt < 60 && move != 0.0; ++bt) {
          bool ok = true;
          for (std::size_t p = 0; p < n; ++p) {
            if (uval[p] > 0.0 && m[p] + move * rows[i][p] <= 0.0) {
              ok = false;
              break;
            }
          }
          if (ok) break;
          move *= 0.5;
        }
        if (move == 0.0) continue;
        lam[i] += move;
        for (std::size_t p = 0; p < n; ++p) m[p] += move * rows[i][p];
        worst = std::max(worst, std::fabs(gi));
      }
      if (worst <= 1e-13 * std::max(1.0, S)) break;
    }
    g = eval_g(lam, m);
    out.upper = std::min(out.upper, g);

    // Candidate point of the relaxation; retract if the true ball rejects it.
    std::vector<double> xc(n);
    for (std::size_t p = 0; p < n; ++p)
      xc[p] = (m[p] > 0.0) ? uval[p] / m[p] : opts.floor_val;
    double nrm = X.norming_functional_dense(support, xc, phi);
    if (!(nrm > 0)) break;
    double obj = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      obj += uval[p] * std::log(std::max(xc[p], opts.floor_val));
    if (nrm > 1.0) obj -= S * std::log(nrm);
    if (obj > out.objective) {
      out.objective = obj;
      out.x = xc;
      if (nrm > 1.0)
        for (auto& v : out.x) v /= nrm;
    }
    if (out.upper - out.objective <= gap_target) break;
    std::size_t before = rows.size();
    add_row(phi);
    if (rows.size() == before) break;  // no new certificate: numerical floor
  }
  return out;
}

Factorization assemble(const FinSeq& u, const Space& X, const FinSeq& x, Value phi,
                       bool certify, int iterations, std::uint64_t seed) {
  Factorization f;
  f.u = u;
  f.x = x;
  f.xstar = u.pointwise_div_on_support(x);
  f.phi = phi;
  f.iterations = iterations;
  f.seed = seed;
  Rational S = u.l1_norm();
  Value term1 = vabs(Value(pairing(f.x, f.xstar)) - Value(S));  // exact arithmetic
  if (certify) {
    Value dn = X.dual_norm(f.xstar).value;
    f.duality_gap = vmax(term1, vabs(dn - Value(S)));
    f.dual_checked = true;
  } else {
    f.duality_gap = term1;
    f.dual_checked = false;
  }
  return f;
}

Factorization factorize_nonneg(const FinSeq& u, const Space& X, const SolveOpts& opts) {
  if (!u.is_nonneg()) throw std::domain_error("factorize: u must be nonnegative");
  if (u.is_zero()) throw std::domain_error("factorize: u must be nonzero");

  if (X.tag() == SpaceTag::z_dual && !opts.force_direct) {
    // Dual route: factor through z and exchange the roles. If u = x x* with
    // x on the z sphere and x* = u/x of dual norm ||u||_1, then u = (x*/S)(S x)
    // is the factorization through the dual space.
    SolveOpts zopts = opts;
    zopts.certify = false;
    Factorization zf = factorize_nonneg(u, X.dual(), zopts);
    Rational S = u.l1_norm();
    FinSeq x = zf.xstar.scaled(Rational(1) / S);
    Value phi = signed_log_pairing(u, x, X.mode());
    Factorization f = assemble(u, X, x, phi, opts.certify, zf.iterations, opts.seed);
    return f;
  }

  std::vector<Index> support = u.support();
  std::vector<double> uval;
  uval.reserve(support.size());
  for (const auto& [j, v] : u.entries()) uval.push_back(v.get_d());

  AscentResult best;
  int total_iters = 0;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    std::uint64_t s = (r == 0) ? 0 : opts.seed + r;
    AscentResult a = ascend(X, support, uval, opts, s);
    total_iters += a.iterations;
    if (a.objective > best.objective || best.x.empty()) best = std::move(a);
  }
  RefineResult fine = refine(X, support, uval, best.x, opts);
  if (fine.objective > best.objective) best.x = fine.x;
  total_iters += fine.rounds;

  FinSeq x;
  for (std::size_t p = 0; p < support.size(); ++p)
    x.set(support[p], rational_from_double(best.x[p]));
  Value phi = signed_log_pairing(u, x, X.mode());
  return assemble(u, X, x, phi, opts.certify, total_iters, opts.seed);
}

}  // namespace

Factorization factorize(const FinSeq& u, const Space& X, const SolveOpts& opts) {
  return factorize_nonneg(u, X, opts);
}

Value indicator(const FinSeq& u, const Space& X, const SolveOpts& opts) {
  if (u.is_zero()) return Value(Rational(0));
  if (u.is_nonneg()) return factorize_nonneg(u, X, opts).phi;
  Factorization f = factorize_nonneg(u.abs(), X, opts);
  return signed_log_pairing(u, f.x, X.mode());
}

DefectReport defect(const std::vector<FinSeq>& parts, const Space& X,
                    const SolveOpts& opts) {
  if (parts.empty()) throw std::invalid_argument("defect: empty part list");
  DefectReport rep;
  rep.parts = parts;
  FinSeq whole;
  rep.sum_phi = Value::zero();
  for (const auto& p : parts) {
    if (!p.is_nonneg()) throw std::domain_error("defect: parts must be nonnegative");
    Value ph = indicator(p, X, opts);
    rep.per_part_phi.push_back(ph);
    rep.sum_phi = rep.sum_phi + ph;
    whole = whole + p;
  }
  rep.whole_phi = indicator(whole, X, opts);
  rep.delta = rep.sum_phi - rep.whole_phi;

  Rational S = whole.l1_norm();
  Value bound = Value::zero();
  if (sgn(S) > 0) {
    for (const auto& p : parts) {
      Rational m = p.l1_norm();
      if (sgn(m) == 0) continue;  // vanishing mass contributes nothing
      Rational ratio = S / m;
      Value lg = (X.mode() == EvalMode::exact) ? Value(log_enc(ratio))
                                               : Value(std::log(ratio.get_d()));
      bound = bound + Value(m) * lg;
    }
  }
  rep.entropy_bound = bound;
  return rep;
}

LemmaReport check_quasilinearity_bound(const FinSeq& u, const FinSeq& v, const Space& X,
                                       double tol, const SolveOpts& opts) {
  Value phi_u = indicator(u, X, opts);
  Value phi_v = indicator(v, X, opts);
  Value phi_uv = indicator(u + v, X, opts);
  Value delta = phi_u + phi_v - phi_uv;
  Value mass = Value(u.l1_norm() + v.l1_norm());
  Value four_over_e = (X.mode() == EvalMode::exact)
                          ? Value(enc_div(Enc::point(4.0), const_e_enc()))
                          : Value(4.0 / std::exp(1.0));
  LemmaReport r = LemmaReport::of("eq1", vabs(delta), four_over_e * mass, tol);
  r.note = "space=" + X.name();
  return r;
}

namespace {
bool upper_estimate_space(const Space& X) {
  return X.tag() == SpaceTag::linf || X.tag() == SpaceTag::z_dual;
}
}  // namespace

std::pair<LemmaReport, LemmaReport> check_restricted_defect(
    const std::vector<FinSeq>& parts, const std::vector<Index>& A, const Space& X,
    double tol, const SolveOpts& opts) {
  FinSeq u;
  for (const auto& p : parts) u = u + p;
  Rational mass = u.l1_norm();
  const std::size_t n = parts.size();

  std::vector<FinSeq> Aparts, nonzero_Aparts;
  for (const auto& p : parts) Aparts.push_back(restrict(A, p));
  for (const auto& p : Aparts)
    if (!p.is_zero()) nonzero_Aparts.push_back(p);

  Rational t = restrict(A, u).l1_norm();
  Value phi_t = entropy_phi(t, X.mode());
  Value d_full = defect(parts, X, opts).delta;
  Value d_restr = nonzero_Aparts.empty() ? Value::zero()
                                         : defect(nonzero_Aparts, X, opts).delta;
  Value logfn = log_f_value(n, X.mode());

  bool applicable = upper_estimate_space(X) && mass <= 1 &&
                    BlockFamily::successive(parts) && u.is_nonneg();

  LemmaReport upper = LemmaReport::of("lemma_3_3_upper", d_restr, d_full + phi_t, tol);
  LemmaReport lower = LemmaReport::of(
      "lemma_3_3_lower", d_full - (Value(Rational(1) - t)) * logfn - phi_t, d_restr, tol);
  upper.applicable = applicable;
  lower.applicable = applicable;
  std::string note = "space=" + X.name() + " n=" + std::to_string(n) +
                     " t=" + format_double(t.get_d());
  upper.note = note;
  lower.note = note;
  return {lower, upper};
}

LemmaReport check_block_defect_bound(const std::vector<FinSeq>& parts, const Space& X,
                                     double tol, const SolveOpts& opts) {
  const std::size_t n = parts.size();
  Value d = defect(parts, X, opts).delta;
  Rational mass(0);
  for (const auto& p : parts) mass += p.l1_norm();
  Value logfn = log_f_value(n, X.mode());
  LemmaReport r = LemmaReport::of("lemma_3_1", d, logfn * Value(mass), tol);
  r.applicable = upper_estimate_space(X) && BlockFamily::successive(parts);
  r.note = "space=" + X.name() + " n=" + std::to_string(n);
  return r;
}

LemmaReport check_near_optimal_factor(const FinSeq& u, const FinSeq& x, const Space& X,
                                      double tol, const SolveOpts& opts) {
  if (!u.is_nonneg() || u.is_zero())
    throw std::domain_error("check_near_optimal_factor: u must be nonnegative, nonzero");
  Rational S = u.l1_norm();
  LemmaReport r;
  r.id = "lemma_3_4";
  r.tolerance = tol;
  r.note = "space=" + X.name();
  if (S > 1) {
    r.applicable = false;
    r.note += " inapplicable: ||u||_1 > 1";
    return r;
  }
  // x must be a feasible factor and u/x a feasible functional.
  bool xpos = true;
  for (const auto& [j, v] : u.entries())
    if (sgn(x.at(j)) <= 0) xpos = false;
  if (!xpos) {
    r.applicable = false;
    r.note += " inapplicable: x vanishes on supp u";
    return r;
  }
  double feas_tol = 1e-6;
  if (X.norm(x).value.approx() > 1.0 + feas_tol) {
    r.applicable = false;
    r.note += " inapplicable: ||x||_X > 1";
    return r;
  }
  FinSeq xstar = u.pointwise_div_on_support(x);
  Value dn = X.dual_norm(xstar).value;
  if (dn.approx() > 1.0 + feas_tol) {
    r.applicable = false;
    r.note += " inapplicable: ||u/x||_{X*} > 1";
    return r;
  }
  Value lhs = indicator(u, X, opts) - signed_log_pairing(u, x, X.mode());
  Value rhs;
  if (sgn(S) == 0 || S == 1) {
    rhs = Value(Rational(0));
  } else {
    rhs = (X.mode() == EvalMode::exact) ? Value(S) * Value(log_enc(Rational(1 / S)))
                                        : Value(S.get_d() * std::log(1.0 / S.get_d()));
  }
  LemmaReport res = LemmaReport::of("lemma_3_4", lhs, rhs, tol, "", r.note);
  return res;
}

LemmaReport check_split_additivity(const std::vector<Rational>& s,
                                   const std::vector<Rational>& t, EvalMode mode,
                                   double tol) {
  if (s.size() != t.size())
    throw std::invalid_argument("check_split_additivity: length mismatch");
  auto term = [&](const Rational& a, const Rational& b) -> Value {
    // a log((a+b)/a); zero when a vanishes
    if (sgn(a) == 0) return Value(Rational(0));
    Rational ratio = (a + b) / a;
    if (mode == EvalMode::exact) return Value(a) * Value(log_enc(ratio));
    return Value(a.get_d() * std::log(ratio.get_d()));
  };
  Value lhs = Value::zero();
  Rational S(0), T(0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (sgn(s[i]) < 0 || sgn(t[i]) < 0)
      throw std::domain_error("check_split_additivity: negative input");
    lhs = lhs + term(s[i], t[i]) + term(t[i], s[i]);
    S += s[i];
    T += t[i];
  }
  Value rhs = term(S, T) + term(T, S);
  LemmaReport r = LemmaReport::of("lemma_3_2", lhs, rhs, tol);
  r.note = "n=" + std::to_string(s.size());
  return r;
}

}  // namespace seqspace
