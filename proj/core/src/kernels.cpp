#include "frameforge/kernels.hpp"

#include <cmath>
#include <utility>

#include "frameforge/errors.hpp"

namespace frameforge {

namespace {

Rational frac1(const Rational& q) { return q - Rational(rat_floor(q)); }

// Wraps to the fundamental period [-1/2, 1/2).
Rational wrap_half(const Rational& t) {
  return t - Rational(rat_floor(t + Rational(1, 2)));
}

long to_long_checked(const BigInt& z, const char* what) {
  if (z < -5000000 || z > 5000000) throw CapExceeded(std::string(what) + " too large to materialize");
  return z.convert_to<long>();
}

Real tri_hat(const Rational& h, const BigInt& n) {
  if (n == 0) return Real::from_rational(h);
  Real theta = Real::pi() * Real::from_rational(frac1(h * Rational(n)));
  Real s = sin(theta);
  Real den = Real::from_rational(h) * Real::pi() * Real::pi() * Real(n * n);
  return s * s / den;
}

Ivl tri_hat_ivl(const Rational& h, const BigInt& n) {
  if (n == 0) return Ivl::from_rational(h);
  Ivl theta = Ivl::pi() * Ivl::from_rational(frac1(h * Rational(n)));
  Ivl s = sin_enclosure(theta);
  Ivl s2 = s * s;
  if (s2.lo.sgn() < 0) s2.lo = Real(0L);  // a square
  Ivl den = Ivl::from_rational(h) * Ivl::pi() * Ivl::pi() * Ivl::exact_big(n * n);
  return s2 / den;
}

// 1 + 2cos(2*pi*n*h), the three-bump factor of the trapezoid.
Real comb_factor(const Rational& h, const BigInt& n) {
  Real ang = Real(2L) * Real::pi() * Real::from_rational(frac1(h * Rational(n)));
  return Real(1L) + Real(2L) * cos(ang);
}

Ivl comb_factor_ivl(const Rational& h, const BigInt& n) {
  Ivl ang = Ivl::of_int(2) * Ivl::pi() * Ivl::from_rational(frac1(h * Rational(n)));
  Ivl c = cos_enclosure(ang);
  return clamp(Ivl::of_int(1) + Ivl::of_int(2) * c, Real(-1L), Real(3L));
}

Real pair_factor(const Rational& a, const BigInt& n) {
  Real ang = Real(2L) * Real::pi() * Real::from_rational(frac1(a * Rational(n)));
  return Real(2L) * cos(ang);
}

Ivl pair_factor_ivl(const Rational& a, const BigInt& n) {
  Ivl ang = Ivl::of_int(2) * Ivl::pi() * Ivl::from_rational(frac1(a * Rational(n)));
  return clamp(Ivl::of_int(2) * cos_enclosure(ang), Real(-2L), Real(2L));
}

Rational tri_value(const Rational& h, const Rational& t0) {
  Rational t = rat_abs(wrap_half(t0));
  if (t >= h) return Rational(0);
  return Rational(1) - t / h;
}

Rational trap_value(const Rational& h, const Rational& t) {
  return tri_value(h, t + h) + tri_value(h, t) + tri_value(h, t - h);
}

// x^p for a nonnegative interval and exponent p > 0.
Ivl pow_nonneg(const Ivl& x, const Ivl& p) {
  Real lo(0L), hi(0L);
  if (x.hi.sgn() > 0) hi = pow(Ivl(x.hi, x.hi), p).hi;
  if (x.lo.sgn() > 0) lo = pow(Ivl(x.lo, x.lo), p).lo;
  return Ivl(lo, hi);
}

}  // namespace

void KernelSpec::validate() const {
  switch (kind) {
    case KernelKind::Triangle:
      if (!(h > 0 && h < Rational(1, 2)))
        throw OutOfRange("Triangle requires 0 < h < 1/2, got h=" + rat_str(h));
      return;
    case KernelKind::Trapezoid:
      if (!(h > 0 && h < Rational(1, 4)))
        throw OutOfRange("Trapezoid requires 0 < h < 1/4, got h=" + rat_str(h));
      return;
    case KernelKind::NonnegPhi:
      if (!(h > 0 && h < Rational(1, 8)))
        throw OutOfRange("NonnegPhi requires 0 < h < 1/8, got h=" + rat_str(h));
      if (!(a > 2 * h && a < Rational(1, 2) - 2 * h))
        throw OutOfRange("NonnegPhi requires 2h < a < 1/2 - 2h, got a=" + rat_str(a));
      return;
  }
  throw OutOfRange("unknown kernel kind");
}

Rational KernelSpec::tail_scale() const {
  switch (kind) {
    case KernelKind::Triangle: return Rational(1);
    case KernelKind::Trapezoid: return Rational(3);
    case KernelKind::NonnegPhi: return Rational(12);
  }
  return Rational(0);
}

std::string KernelSpec::kind_name() const {
  switch (kind) {
    case KernelKind::Triangle: return "triangle";
    case KernelKind::Trapezoid: return "trapezoid";
    case KernelKind::NonnegPhi: return "nonneg-phi";
  }
  return "unknown";
}

Real kernel_coeff(const KernelSpec& spec, const BigInt& n) {
  spec.validate();
  switch (spec.kind) {
    case KernelKind::Triangle:
      return tri_hat(spec.h, n);
    case KernelKind::Trapezoid:
      return tri_hat(spec.h, n) * comb_factor(spec.h, n);
    case KernelKind::NonnegPhi: {
      Real nu_hat = comb_factor(spec.h, n) * pair_factor(spec.a, n);
      Real v = tri_hat(spec.h, n) * (Real(6L) - nu_hat);
      if (n == 0) v += Real(1L);
      return v;
    }
  }
  return Real(0L);
}

Ivl kernel_coeff_ivl(const KernelSpec& spec, const BigInt& n) {
  spec.validate();
  switch (spec.kind) {
    case KernelKind::Triangle:
      return tri_hat_ivl(spec.h, n);
    case KernelKind::Trapezoid:
      return tri_hat_ivl(spec.h, n) * comb_factor_ivl(spec.h, n);
    case KernelKind::NonnegPhi: {
      Ivl nu_hat = clamp(comb_factor_ivl(spec.h, n) * pair_factor_ivl(spec.a, n),
                         Real(-6L), Real(6L));
      Ivl v = tri_hat_ivl(spec.h, n) * (Ivl::of_int(6) - nu_hat);
      if (n == 0) v = v + Ivl::of_int(1);
      return v;
    }
  }
  return Ivl::of_int(0);
}

Rational kernel_value(const KernelSpec& spec, const Rational& t) {
  spec.validate();
  switch (spec.kind) {
    case KernelKind::Triangle:
      return tri_value(spec.h, t);
    case KernelKind::Trapezoid:
      return trap_value(spec.h, t);
    case KernelKind::NonnegPhi:
      return Rational(1) + 6 * tri_value(spec.h, t) - trap_value(spec.h, t + spec.a) -
             trap_value(spec.h, t - spec.a);
  }
  return Rational(0);
}

Ivl tail_a1_bound(const KernelSpec& spec, const BigInt& d) {
  spec.validate();
  if (d < 1) throw OutOfRange("tail bound requires d >= 1");
  Ivl num = Ivl::from_rational(2 * spec.tail_scale());
  Ivl den = Ivl::from_rational(spec.h) * Ivl::pi() * Ivl::pi() * Ivl::exact_big(d);
  return num / den;
}

Ivl tail_power_bound(const KernelSpec& spec, const BigInt& d, double p) {
  spec.validate();
  if (d < 1) throw OutOfRange("tail bound requires d >= 1");
  if (!(p > 0.5)) throw OutOfRange("power tail bound requires p > 1/2");
  Ivl P = Ivl::of(p);
  Ivl one = Ivl::of_int(1), two = Ivl::of_int(2);
  Ivl s = Ivl::from_rational(spec.tail_scale());
  Ivl hpi2 = Ivl::from_rational(spec.h) * Ivl::pi() * Ivl::pi();
  Ivl D = Ivl::exact_big(d);
  return two * pow(s, P) * pow(hpi2, -P) * pow(D, one - two * P) / (two * P - one);
}

Truncation truncate(const KernelSpec& spec, const BigInt& d) {
  spec.validate();
  if (d < 1) throw OutOfRange("truncation requires d >= 1");
  long dl = to_long_checked(d, "truncation degree");
  Truncation out;
  out.degree = d;
  out.tail_a1 = tail_a1_bound(spec, d);
  for (long n = -dl; n <= dl; ++n)
    out.poly.set_term(Freq(n), Cplx(kernel_coeff(spec, BigInt(n))));
  return out;
}

NormReport norm_bound_check(const KernelSpec& spec, double p, const BigInt& d) {
  spec.validate();
  if (!(p >= 1.0)) throw OutOfRange("norm check requires p >= 1");
  long dl = to_long_checked(d, "truncation degree");

  NormReport rep;
  rep.p = p;
  rep.degree = d;

  Ivl P = Ivl::of(p);
  Ivl one = Ivl::of_int(1);
  Ivl inv_p = one / P;
  bool osc = spec.kind == KernelKind::NonnegPhi;  // measure phi - 1

  Ivl sum = Ivl::of_int(0);
  for (long n = -dl; n <= dl; ++n) {
    if (osc && n == 0) continue;  // the oscillatory part has no mean
    sum = sum + pow_nonneg(abs(kernel_coeff_ivl(spec, BigInt(n))), P);
  }
  rep.truncated_norm = pow_nonneg(sum, inv_p);
  rep.norm_upper = pow_nonneg(sum + tail_power_bound(spec, d, p), inv_p);

  Ivl h_pow = pow(Ivl::from_rational(spec.h), (P - one) / P);
  rep.analytic_bound = Ivl::from_rational(spec.tail_scale()) * h_pow;
  rep.sharpness_floor = osc ? h_pow : Ivl::of_int(0);

  rep.within_bound = !(rep.truncated_norm.lo > rep.analytic_bound.hi);
  if (!rep.within_bound)
    throw BoundViolated(spec.kind_name() + " A^p norm certifiably exceeds its bound: " +
                        rep.truncated_norm.lo.str(20) + " > " + rep.analytic_bound.hi.str(20));
  if (osc) {
    if (rep.norm_upper.hi < rep.sharpness_floor.lo)
      throw BoundViolated("nonneg-phi oscillatory norm certifiably undercuts the sharpness floor");
    rep.sharp = rep.truncated_norm.lo >= rep.sharpness_floor.hi;
  }
  return rep;
}

NonnegReport nonneg_check(const KernelSpec& spec, const BigInt& coeff_limit) {
  spec.validate();
  if (spec.kind != KernelKind::NonnegPhi)
    throw OutOfRange("nonneg_check applies to the NonnegPhi kernel only");
  long limit = to_long_checked(coeff_limit, "coefficient scan limit");
  if (limit < 1) throw OutOfRange("coefficient scan limit must be >= 1");

  NonnegReport rep;
  rep.coeff_check_limit = coeff_limit;

  const Rational& h = spec.h;
  const Rational& a = spec.a;
  std::vector<Rational> pts = {Rational(0), h,         -h,        a,         -a,
                               a + h,       a - h,     -a + h,    -a - h,    a + 2 * h,
                               a - 2 * h,   -a + 2 * h, -a - 2 * h};
  rep.breakpoints_nonneg = true;
  for (const Rational& t : pts) {
    Rational v = kernel_value(spec, t);
    rep.breakpoint_values.emplace_back(t, v);
    if (v < 0) rep.breakpoints_nonneg = false;
  }

  // Between consecutive breakpoints the kernel is affine, so three
  // exact zeros per band (both ends and the interior node a) force the
  // band to vanish identically.
  rep.vanishes_on_bands = true;
  for (const Rational& c : {Rational(a), Rational(-a)}) {
    for (const Rational& t : {Rational(c - h), Rational(c), Rational(c + h)})
      if (kernel_value(spec, t) != 0) rep.vanishes_on_bands = false;
  }

  Ivl z = kernel_coeff_ivl(spec, BigInt(0));
  rep.zero_coeff_is_one = z.lo == Real(1L) && z.hi == Real(1L);

  rep.coeffs_nonneg = true;
  bool first = true;
  for (long n = 1; n <= limit; ++n) {
    Ivl c = kernel_coeff_ivl(spec, BigInt(n));
    if (c.lo.sgn() < 0) rep.coeffs_nonneg = false;
    if (first || c.hi < rep.min_coeff.hi) rep.min_coeff = c;
    first = false;
  }

  if (!rep.breakpoints_nonneg)
    throw BoundViolated("nonneg-phi takes a negative value at a breakpoint");
  if (!rep.vanishes_on_bands)
    throw BoundViolated("nonneg-phi fails to vanish on its prescribed bands");
  if (!rep.zero_coeff_is_one)
    throw BoundViolated("nonneg-phi mean coefficient is not exactly 1");
  if (!rep.coeffs_nonneg)
    throw BoundViolated("nonneg-phi has a coefficient enclosure below zero");
  return rep;
}

}  // namespace frameforge
