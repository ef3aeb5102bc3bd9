#include "frameforge/localization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "frameforge/errors.hpp"
#include "frameforge/kernels.hpp"

namespace frameforge {

namespace {

// Exact power of two.
Real pow2(long e) {
  Real r(1L);
  mpfr_mul_2si(r.raw(), r.raw(), e, MPFR_RNDN);
  return r;
}

// cos(2 pi q) with the argument reduced mod 1 in exact arithmetic first.
Real cos2pi(const Rational& q) {
  Rational fr = q - Rational(rat_floor(q));
  return cos(Real(2L) * Real::pi() * Real::from_rational(fr));
}

// Endpointwise power tolerating a zero (or slightly negative, from
// outward rounding) lower endpoint.
Ivl pow_nn(const Ivl& base, const Ivl& ex) {
  if (base.hi.sgn() <= 0) return Ivl(Real(0L));
  if (base.lo.sgn() <= 0) return Ivl(Real(0L), pow(Ivl(base.hi), ex).hi);
  return pow(base, ex);
}

struct Chain {
  std::vector<ChainEntry> entries;
  std::string first_fail;

  bool push(const char* id, const Ivl& lhs, const Ivl& rhs) {
    ChainEntry e;
    e.id = id;
    e.lhs = lhs;
    e.rhs = rhs;
    e.margin = rhs.lo - lhs.hi;
    e.ok = lhs.certainly_less(rhs);
    if (!e.ok && first_fail.empty()) first_fail = e.id;
    entries.push_back(std::move(e));
    return entries.back().ok;
  }
  bool ok() const { return first_fail.empty(); }
};

// The count-dependent inequalities of the parameter system. The power
// conditions are stated in the log domain so both sides stay
// representable for astronomical N; ids carry a "-log" suffix.
struct SystemParts {
  Ivl sup_lhs, sup_rhs;        // 1/N < eps
  Ivl growth_lhs, growth_rhs;  // N log1p(s^p h^{p-1}) < log1p(delta)
  bool has_mean = false;
  Ivl mean_lhs, mean_rhs;  // N (-log(1-3h)) < -log(1-delta)
  Ivl tail_lhs, tail_rhs;  // p log s' - p log N - log h < log(1-delta)
};

SystemParts system_parts(const Ivl& P, const Ivl& E, const Ivl& D, const Ivl& H,
                         const Ivl& NI, bool nonneg) {
  const Ivl one = Ivl::of_int(1);
  const Ivl s_growth = Ivl::of_int(nonneg ? 12 : 3);
  const Ivl s_tail = Ivl::of_int(nonneg ? 13 : 4);
  SystemParts sp;
  sp.sup_lhs = one / NI;
  sp.sup_rhs = E;
  sp.growth_lhs = NI * log1p(exp(P * log(s_growth) + (P - one) * log(H)));
  sp.growth_rhs = log1p(D);
  if (!nonneg) {
    sp.has_mean = true;
    Ivl three_h = Ivl::of_int(3) * H;
    if (three_h.hi >= Real(1L)) {
      sp.mean_lhs = Ivl(Real::pos_inf());
      sp.mean_rhs = Ivl(Real(0L));
    } else {
      sp.mean_lhs = NI * (-log1p(-three_h));
      sp.mean_rhs = -log1p(-D);
    }
  }
  sp.tail_lhs = P * log(s_tail) - P * log(NI) - log(H);
  sp.tail_rhs = log1p(-D);
  return sp;
}

bool system_ok(const SystemParts& sp) {
  if (!sp.sup_lhs.certainly_less(sp.sup_rhs)) return false;
  if (!sp.growth_lhs.certainly_less(sp.growth_rhs)) return false;
  if (sp.has_mean && !sp.mean_lhs.certainly_less(sp.mean_rhs)) return false;
  return sp.tail_lhs.certainly_less(sp.tail_rhs);
}

// The two delta margin inequalities; independent of h and N.
bool margins_ok(const Ivl& P, const Ivl& E, const Ivl& D, bool nonneg) {
  const Ivl one = Ivl::of_int(1), two = Ivl::of_int(2);
  Ivl lhs1 = nonneg ? D : (one + D) - pow_nn(one - D, P) + pow_nn(D, P);
  if (!lhs1.certainly_less(pow(E / two, P))) return false;
  Ivl lhs2 = D * pow(one + D, one / P);
  return lhs2.certainly_less(E / two);
}

// Certified bound on |f g - f|_A from kernel truncation tails. With
// F, G the untruncated pair one has F G = F exactly (the trapezoid is
// identically 1 on the triangle's support; the nonneg kernel vanishes
// on the notch bands), so
//   f g - f = (f - F) g + F (g - G) + (F - f),
// giving tail_F (1 + |g|_A) + |F|_A tail_G / h with 1 + |g|_A <= 1/h.
// Standard pair: |F|_A <= 1 + 3 = 4. Nonneg pair: |F|_A = F(0) = 7 by
// coefficient nonnegativity.
Ivl fg_tail_bound(const Rational& h, const Rational& a, const BigInt& deg_f,
                  const BigInt& deg_g, bool nonneg) {
  KernelSpec tri{KernelKind::Triangle, h, Rational(0)};
  Ivl tail_g = tail_a1_bound(tri, deg_g);
  Ivl tail_f, norm_f;
  if (nonneg) {
    KernelSpec phi{KernelKind::NonnegPhi, h, a};
    tail_f = tail_a1_bound(phi, deg_f);
    norm_f = Ivl::of_int(7);
  } else {
    KernelSpec trap{KernelKind::Trapezoid, h, Rational(0)};
    tail_f = tail_a1_bound(trap, deg_f);
    norm_f = Ivl::of_int(4);
  }
  Ivl hinv = Ivl::of_int(1) / Ivl::from_rational(h);
  return tail_f * hinv + norm_f * tail_g * hinv;
}

}  // namespace

LocalizationCertificate certify_report(const LocalizationParams& params) {
  LocalizationCertificate cert;
  cert.params = params;
  Chain ch;

  const Ivl zero(Real(0L));
  const Ivl one = Ivl::of_int(1), two = Ivl::of_int(2), three = Ivl::of_int(3);
  const Ivl P = Ivl::of(params.p), E = Ivl::of(params.eps);
  const Ivl D(params.delta), H(params.h);

  ch.push("p-above-one", one, P);
  ch.push("golden-threshold", one, P * (P - one));
  ch.push("eps-positive", zero, E);
  ch.push("eps-below-two-thirds", E, Ivl::from_rational(Rational(2, 3)));
  ch.push("delta-positive", zero, D);
  ch.push("delta-below-one", D, one);
  ch.push("h-positive", zero, H);
  ch.push("h-admissible", H, Ivl::from_rational(Rational(1, params.nonneg ? 8 : 4)));
  ch.push("count-positive", zero, Ivl::exact_big(params.N));
  BigInt mindeg = params.deg_f < params.deg_g ? params.deg_f : params.deg_g;
  ch.push("degree-positive", zero, Ivl::exact_big(mindeg));
  ch.push("dilation-gap", Ivl::exact_big(2 * (params.deg_f + params.deg_g)),
          Ivl::exact_big(params.nu));
  if (params.nonneg) {
    Ivl band = Ivl::from_rational(params.a);
    ch.push("band-inner-gap", two * H, band);
    ch.push("band-outer-gap", band, Ivl::from_rational(Rational(1, 2)) - two * H);
  }

  if (!ch.ok()) {
    cert.chain = std::move(ch.entries);
    cert.failure = ch.first_fail;
    return cert;
  }

  const Ivl NI = Ivl::exact_big(params.N);
  SystemParts sp = system_parts(P, E, D, H, NI, params.nonneg);
  ch.push("sup-coeff-below-eps", sp.sup_lhs, sp.sup_rhs);
  ch.push("power-growth-log", sp.growth_lhs, sp.growth_rhs);
  if (sp.has_mean) ch.push("mean-floor-log", sp.mean_lhs, sp.mean_rhs);
  ch.push("tail-ceiling-log", sp.tail_lhs, sp.tail_rhs);

  // The distance of gamma from 1: |gamma|^p <= 1+delta by the growth
  // entry, and (standard mode) the mean sits in (1-delta, 1] by the
  // floor entry, so replacing the zero coefficient costs at most
  // (1+delta) - (1-delta)^p + delta^p. Nonneg mode has mean exactly 1
  // and the cost is plain delta.
  Ivl margin1_lhs =
      params.nonneg ? D : (one + D) - pow_nn(one - D, P) + pow_nn(D, P);
  ch.push("mean-deviation-margin", margin1_lhs, pow(E / two, P));
  Ivl pow1p = pow(one + D, one / P);
  ch.push("crossterm-margin", D * pow1p, E / two);

  ch.push("truncation-tail",
          fg_tail_bound(params.h.to_rational_exact(), params.a, params.deg_f,
                        params.deg_g, params.nonneg),
          D);

  // Sections: the complete dilation levels contribute at most
  // delta (1+delta)^{1/p} + (1+delta)^{1/p} < 2, the one incomplete
  // level at most (s'^p N^{-p} h^{-1} (1+delta))^{1/p} < 1.
  ch.push("section-head-bound", D * pow1p + pow1p, two);
  Ivl section_tail_log = sp.tail_lhs + log1p(D);
  ch.push("section-tail-log", section_tail_log, zero);

  cert.cond_sup_coeff = sp.sup_lhs;
  cert.cond_gamma_dist = pow_nn(margin1_lhs, one / P);
  cert.cond_product_dist = D * pow1p + cert.cond_gamma_dist;
  cert.cond_section = D * pow1p + pow1p + exp(section_tail_log / P);

  ch.push("gamma-dist-below-eps", cert.cond_gamma_dist, E);
  ch.push("product-dist-below-eps", cert.cond_product_dist, E);
  ch.push("section-bound-le-three", cert.cond_section, three);

  if (params.nonneg) {
    // Structural facts of the nonneg pair: the kernel's coefficients
    // are nonnegative with zero coefficient exactly 1, and products of
    // dilates inherit both under the dilation-gap invariant.
    cert.mean_is_one = true;
    cert.coeffs_nonneg = true;
  }

  cert.chain = std::move(ch.entries);
  cert.valid = ch.ok();
  cert.failure = ch.first_fail;
  return cert;
}

LocalizationCertificate certify(const LocalizationParams& params) {
  LocalizationCertificate cert = certify_report(params);
  if (!cert.valid)
    throw ChainBroken("certificate chain fails at entry '" + cert.failure + "'");
  return cert;
}

LocalizationParams solve_params(double p, double eps, bool nonneg) {
  const Ivl zero(Real(0L));
  const Ivl one = Ivl::of_int(1);
  const Ivl P = Ivl::of(p), E = Ivl::of(eps);
  if (!(zero.certainly_less(E) &&
        E.certainly_less(Ivl::from_rational(Rational(2, 3)))))
    throw OutOfRange("eps must lie in (0, 2/3)");
  if (!one.certainly_less(P * (P - one)))
    throw Infeasible("p is not certifiably above the golden-ratio threshold (1+sqrt 5)/2");

  const long s_growth = nonneg ? 12 : 3;
  const Rational h_cap(1, nonneg ? 8 : 4);
  const Real h_cap_r = Real::from_rational(h_cap);

  for (long de = 1; de <= 64; ++de) {
    Real delta = pow2(-de);
    Ivl D(delta);
    if (!margins_ok(P, E, D, nonneg)) continue;

    // Recipe: eta = s^{-p} log(1+delta) and h(N) from N = eta h^{1-p},
    // which makes the growth condition hold for every N; the remaining
    // conditions become monotone in N (p <= 2 and all nonneg cases).
    Ivl ln_eta = log(log1p(D)) - P * log(Ivl::of_int(s_growth));
    auto h_of = [&](const BigInt& n) -> Real {
      return exp(((ln_eta - log(Ivl::exact_big(n))) / (P - one)).mid());
    };
    auto feasible = [&](const BigInt& n) -> bool {
      Real h = h_of(n);
      if (!(h > Real(0L)) || !(h < h_cap_r)) return false;
      return system_ok(system_parts(P, E, D, Ivl(h), Ivl::exact_big(n), nonneg));
    };

    BigInt found = 0;
    Real found_h;
    BigInt lo = (one / E).hi.to_bigint_floor();  // 1/N < eps fails here
    if (lo < 1) lo = 1;
    {
      BigInt n = lo + 1;
      for (int step = 0; step < 2400; ++step) {
        if (feasible(n)) {
          found = n;
          break;
        }
        lo = n;
        n <<= 1;
      }
    }
    if (found != 0) {
      while (found - lo > 1) {
        BigInt mid = (lo + found) >> 1;
        if (feasible(mid))
          found = mid;
        else
          lo = mid;
      }
      found_h = h_of(found);
    } else {
      // Direct (h, N) search for the regime the recipe misses: for
      // p > 2 the mean floor tightens as N grows, so the feasible N
      // window must be located per h instead.
      for (long ke = nonneg ? 4 : 3; ke <= 6000 && found == 0; ++ke) {
        Real h = pow2(-ke);
        Ivl H(h);
        Ivl ln_lo = max(-log(E), (P * log(Ivl::of_int(nonneg ? 13 : 4)) -
                                  log(H) - log1p(-D)) /
                                     P);
        Ivl x = exp(P * log(Ivl::of_int(s_growth)) + (P - one) * log(H));
        Ivl ln_hi = log(log1p(D)) - log(log1p(x));
        if (!nonneg) {
          Ivl three_h = Ivl::of_int(3) * H;
          ln_hi = min(ln_hi, log(-log1p(-D)) - log(-log1p(-three_h)));
        }
        if (!(ln_lo.hi < ln_hi.lo)) continue;
        if (!(ln_lo.hi < Real(300000.0))) continue;  // internal cap
        BigInt cand = exp(Ivl(ln_lo.hi)).hi.to_bigint_floor() + 1;
        for (int b = 0; b < 200; ++b) {
          if (system_ok(system_parts(P, E, D, H, Ivl::exact_big(cand), nonneg))) {
            found = cand;
            found_h = h;
            break;
          }
          BigInt stepn = cand >> 52;
          if (stepn < 1) stepn = 1;
          cand += stepn;
        }
      }
    }
    if (found == 0) continue;

    // Truncation degrees: smallest power of two whose certified
    // |f g - f|_A bound undershoots delta. The constant 14 (standard)
    // or 38 (nonneg) collects the tail factors of fg_tail_bound.
    Rational h_rat = found_h.to_rational_exact();
    long c0 = nonneg ? 38 : 14;
    Real kr = (log(Real(c0)) - Real(2L) * log(found_h) -
               Real(2L) * log(Real::pi()) - log(delta)) /
              log(Real(2L));
    long k = kr.to_bigint_ceil().convert_to<long>();
    if (k < 1) k = 1;
    BigInt deg;
    bool deg_ok = false;
    for (long t = 0; t < 80 && !deg_ok; ++t, ++k) {
      deg = BigInt(1) << static_cast<unsigned>(k);
      deg_ok = fg_tail_bound(h_rat, Rational(1, 4), deg, deg, nonneg)
                   .certainly_less(D);
    }
    if (!deg_ok) continue;

    LocalizationParams out;
    out.p = p;
    out.eps = eps;
    out.delta = delta;
    out.h = found_h;
    out.N = found;
    out.deg_f = deg;
    out.deg_g = deg;
    out.nu = 4 * deg + 1;
    out.nonneg = nonneg;
    out.a = Rational(1, 4);
    if (certify_report(out).valid) return out;
  }
  throw Infeasible("no parameters satisfy the margin and growth system within internal caps");
}

ScanCaps ScanCaps::defaults() {
  ScanCaps c;
  c.ln_n_max = Real(1e9);
  c.h_min = Real(1e-46);
  return c;
}

std::vector<ScanRow> scan_threshold(double eps, const std::vector<double>& p_grid,
                                    const ScanCaps& caps) {
  std::vector<ScanRow> rows;
  rows.reserve(p_grid.size());
  const Ivl one = Ivl::of_int(1), three = Ivl::of_int(3), four = Ivl::of_int(4);
  const Ivl E = Ivl::of(eps);
  const Real ln_materialize = Real(std::log(1e18));

  for (double p : p_grid) {
    ScanRow row;
    row.p = p;
    if (!(p > 1.0)) {
      rows.push_back(row);
      continue;
    }
    const Ivl P = Ivl::of(p);
    bool have = false;
    Real best_ln;
    for (long de = 1; de <= 44; ++de) {
      Real delta = pow2(-de);
      Ivl D(delta);
      if (!margins_ok(P, E, D, false)) continue;
      for (long ke = 3;; ++ke) {
        Real h = pow2(-ke);
        if (h < caps.h_min) break;
        Ivl H(h);
        // Window of admissible ln N at this (delta, h): the sup and
        // tail conditions bound it below, growth and mean floor above.
        Ivl ln_lo = max(-log(E), (P * log(four) - log(H) - log1p(-D)) / P);
        Ivl x = exp(P * log(three) + (P - one) * log(H));
        Ivl ln_hi = log(log1p(D)) - log(log1p(x));
        Ivl three_h = three * H;
        ln_hi = min(ln_hi, log(-log1p(-D)) - log(-log1p(-three_h)));
        ln_hi = min(ln_hi, Ivl(caps.ln_n_max));
        if (!(ln_lo.hi < ln_hi.lo)) continue;

        bool good = false;
        BigInt n_exact_val = 0;
        Real ln_val;
        if (ln_lo.hi < ln_materialize) {
          BigInt cand = exp(Ivl(ln_lo.hi)).hi.to_bigint_floor() + 1;
          for (int b = 0; b < 64 && !good; ++b, ++cand) {
            Ivl NI = Ivl::exact_big(cand);
            if (log(NI).hi > caps.ln_n_max) break;
            if (system_ok(system_parts(P, E, D, H, NI, false))) {
              good = true;
              n_exact_val = cand;
              ln_val = log(NI).hi;
            }
          }
        } else if (ln_lo.hi >= Real(20L) &&
                   (ln_hi.lo - ln_lo.hi) > Real(1e-6)) {
          // A multiplicative window of ratio > 1+1e-6 at magnitude
          // >= e^20 has absolute width > 1, so it contains an integer.
          good = true;
          ln_val = ln_lo.hi;
        }
        if (good) {
          if (!have || ln_val < best_ln) {
            have = true;
            best_ln = ln_val;
            row.n_exact = n_exact_val != 0;
            row.n_min = n_exact_val;
            row.ln_n_min = ln_val;
            row.h_used = h;
            row.delta_used = delta;
          }
          break;  // smaller h only raises the minimal admissible count
        }
      }
    }
    row.feasible = have;
    rows.push_back(row);
  }
  return rows;
}

MaterializedInstance materialize(const LocalizationParams& params) {
  if (params.N > 4) throw CapExceeded("tiny-instance count cap is N <= 4");
  if (params.deg_f > 64 || params.deg_g > 64)
    throw CapExceeded("tiny-instance degree cap is 64");
  if (params.N < 1) throw OutOfRange("instance count must be positive");
  if (params.deg_f < 1 || params.deg_g < 1)
    throw OutOfRange("instance degrees must be positive");
  if (!params.h.is_finite() || !(params.h > Real(0L)))
    throw OutOfRange("instance h must be positive and finite");

  Rational h = params.h.to_rational_exact();
  MaterializedInstance inst;
  inst.params = params;

  if (!params.nonneg) {
    KernelSpec trap{KernelKind::Trapezoid, h, Rational(0)};
    KernelSpec tri{KernelKind::Triangle, h, Rational(0)};
    inst.f = sub(TrigPoly::constant(Real(1L)), truncate(trap, params.deg_f).poly);
    Real hinv = Real(1L) / Real::from_rational(h);
    inst.g = sub(TrigPoly::constant(Real(1L)),
                 scale(truncate(tri, params.deg_g).poly, hinv));
  } else {
    KernelSpec phi{KernelKind::NonnegPhi, h, params.a};
    phi.validate();
    inst.f = truncate(phi, params.deg_f).poly;
    KernelSpec tri{KernelKind::Triangle, h, Rational(0)};
    Real hinv = Real(1L) / Real::from_rational(h);
    TrigPoly g;
    for (BigInt n = 1; n <= params.deg_g; ++n) {
      Real c = -(hinv * kernel_coeff(tri, n) * cos2pi(params.a * Rational(n)));
      g.add_term(Freq(n), Cplx(c));
      g.add_term(Freq(-n), Cplx(c));
    }
    inst.g = g;
  }

  inst.gamma.nu = params.nu;
  inst.gamma.runs.push_back(FactoredProduct::Run{inst.f, params.N});
  inst.gamma.validate();

  long n_count = params.N.convert_to<long>();
  Real inv_n = Real(1L) / Real(n_count);
  TrigPoly p_sum;
  BigInt power = 1;
  for (long j = 0; j < n_count; ++j) {
    p_sum = add(p_sum, scale(dilate(inst.g, power), inv_n));
    power *= params.nu;
  }
  inst.P = p_sum;
  return inst;
}

namespace {

// Exact dyadic polynomial arithmetic for the brute-force identity: the
// stored extended-precision coefficients are dyadic rationals, so the
// telescoping identity can be checked with zero rounding error.
using DMap = std::map<Freq, Dyadic>;

Dyadic dyadic_of(const Real& x) {
  Rational q = x.to_rational_exact();
  BigInt num = rat_num(q), den = rat_den(q);
  std::int64_t e = 0;
  while (den > 1) {
    den >>= 1;
    --e;
  }
  return Dyadic(num, e);
}

void dadd(DMap& acc, const Freq& f, const Dyadic& v) {
  if (v.is_zero()) return;
  auto it = acc.find(f);
  if (it == acc.end()) {
    acc.emplace(f, v);
    return;
  }
  it->second = it->second + v;
  if (it->second.is_zero()) acc.erase(it);
}

DMap dmap_of(const TrigPoly& poly) {
  DMap m;
  for (const auto& [f, c] : poly.terms()) {
    if (!c.im.is_zero())
      throw MismatchDetected("instance polynomial has a complex coefficient");
    dadd(m, f, dyadic_of(c.re));
  }
  return m;
}

DMap dmul(const DMap& a, const DMap& b) {
  DMap out;
  for (const auto& [fa, ca] : a)
    for (const auto& [fb, cb] : b) dadd(out, fa + fb, ca * cb);
  return out;
}

DMap ddilate(const DMap& a, const BigInt& nu) {
  DMap out;
  for (const auto& [f, c] : a) out.emplace(f * Freq(nu), c);
  return out;
}

DMap dsub(const DMap& a, const DMap& b) {
  DMap out = a;
  for (const auto& [f, c] : b) dadd(out, f, Dyadic(-c.m, c.e));
  return out;
}

}  // namespace

BruteReport brute_check(const MaterializedInstance& inst) {
  BruteReport rep;
  const double p = inst.params.p;
  const long n_count = inst.params.N.convert_to<long>();
  const BigInt& nu = inst.params.nu;

  // (a) product law: expanded lp norm and zero coefficient against the
  // factored forms.
  TrigPoly gamma_x = expand(inst.gamma);
  FactoredNorm fn = factored_norm(inst.gamma, p);
  double xn = coeff_norm(gamma_x, p).to_double();
  double fnd = fn.norm().to_double();
  rep.norm_rel_err = std::abs(xn - fnd) / std::max(std::abs(fnd), 1e-300);
  if (rep.norm_rel_err > 1e-12)
    throw MismatchDetected("expanded norm disagrees with the factored norm");
  Cplx zf = fn.zero_coeff();
  Cplx zx = gamma_x.coeff(Freq(0));
  double zdiff = (zf - zx).abs().to_double();
  rep.zero_coeff_matches =
      zdiff <= 1e-12 * std::max(1.0, zf.abs().to_double());
  if (!rep.zero_coeff_matches)
    throw MismatchDetected("expanded zero coefficient disagrees with the factored product");

  // (b) telescoping identity, exactly: with P~ = sum_j g(nu^j t),
  //   gamma (P~ - N) = sum_j (f g - f)(nu^j t) prod_{k != j} f(nu^k t).
  DMap fd = dmap_of(inst.f), gd = dmap_of(inst.g);
  std::vector<DMap> fdil(n_count), gdil(n_count);
  {
    BigInt power = 1;
    for (long j = 0; j < n_count; ++j) {
      fdil[j] = ddilate(fd, power);
      gdil[j] = ddilate(gd, power);
      power *= nu;
    }
  }
  DMap gamma_d = fdil[0];
  for (long j = 1; j < n_count; ++j) gamma_d = dmul(gamma_d, fdil[j]);
  DMap p_tilde;
  for (long j = 0; j < n_count; ++j)
    for (const auto& [f, c] : gdil[j]) dadd(p_tilde, f, c);
  dadd(p_tilde, Freq(0), Dyadic(BigInt(-n_count), 0));
  DMap lhs = dmul(gamma_d, p_tilde);

  DMap fg_minus_f = dsub(dmul(fd, gd), fd);
  DMap rhs;
  {
    BigInt power = 1;
    for (long j = 0; j < n_count; ++j) {
      DMap term = ddilate(fg_minus_f, power);
      for (long k = 0; k < n_count; ++k)
        if (k != j) term = dmul(term, fdil[k]);
      for (const auto& [f, c] : term) dadd(rhs, f, c);
      power *= nu;
    }
  }
  rep.identity_exact = dsub(lhs, rhs).empty();
  if (!rep.identity_exact)
    throw MismatchDetected("telescoping product identity fails exactly");

  // (c)+(d) partial-sum splits and soundness of the section bound at
  // measured subquantities. S_l only changes at the distinct frequency
  // magnitudes of P, so checking those (plus 0 and past-degree) covers
  // every split.
  BigInt deg_g_eff = rat_num(inst.g.degree());
  BigInt deg_p = rat_num(inst.P.degree());
  std::set<BigInt> cuts{BigInt(0), deg_p + 1};
  for (const auto& [f, c] : inst.P.terms()) cuts.insert(rat_num(rat_abs(f)));

  Real inv_n = Real(1L) / Real(n_count);
  double fp = coeff_norm(inst.f, p).to_double();
  double fa = coeff_norm(inst.f, 1.0).to_double();
  double dhat = coeff_norm(sub(mul(inst.f, inst.g), inst.f), 1.0).to_double();
  double fp_pow_n1 = std::pow(fp, n_count - 1);
  double fp_pow_n = fp_pow_n1 * fp;

  rep.all_splits_exact = true;
  rep.bounds_respected = true;
  for (const BigInt& l : cuts) {
    SplitCheck sc;
    sc.l = l;
    // complete levels: nu^j * deg(g) <= l
    long s = 0;
    BigInt power = 1;
    while (s < n_count && power * deg_g_eff <= l) {
      ++s;
      power *= nu;
    }
    sc.s = s;
    TrigPoly a_part;
    {
      BigInt pw = 1;
      for (long j = 0; j < s; ++j) {
        a_part = add(a_part, scale(dilate(inst.g, pw), inv_n));
        pw *= nu;
      }
    }
    TrigPoly b_part;
    BigInt m = 0;
    if (s < n_count) {
      m = l / power;
      if (m > deg_g_eff) m = deg_g_eff;
      b_part = scale(dilate(partial_sum(inst.g, Rational(m)), power), inv_n);
    } else {
      m = deg_g_eff;
    }
    sc.m = m;
    TrigPoly s_l = partial_sum(inst.P, Rational(l));
    sc.exact = sub(s_l, add(a_part, b_part)).empty();
    if (!sc.exact) rep.all_splits_exact = false;

    sc.measured_norm = coeff_norm(mul(gamma_x, s_l), p).to_double();
    double head = (static_cast<double>(s) / n_count) * (dhat * fp_pow_n1 + fp_pow_n);
    double tail = 0.0;
    if (s < n_count && m >= 1) {
      double sm = coeff_norm(partial_sum(inst.g, Rational(m)), p).to_double();
      tail = (1.0 / n_count) * fa * sm * fp_pow_n1;
    }
    sc.analytic_bound = head + tail;
    if (sc.measured_norm > sc.analytic_bound * (1.0 + 1e-9) + 1e-30)
      rep.bounds_respected = false;
    rep.splits.push_back(std::move(sc));
  }
  if (!rep.all_splits_exact)
    throw MismatchDetected("a partial-sum split fails to reassemble exactly");
  if (!rep.bounds_respected)
    throw MismatchDetected("a measured section norm exceeds its analytic bound");
  return rep;
}

}  // namespace frameforge
