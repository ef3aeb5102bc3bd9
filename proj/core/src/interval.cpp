#include "frameforge/interval.hpp"

#include "frameforge/errors.hpp"

namespace frameforge {

namespace {

mpfr_prec_t pick(mpfr_prec_t prec) { return prec > 0 ? prec : default_precision(); }

Real dir2(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t),
          const Real& a, const Real& b, mpfr_rnd_t rnd) {
  mpfr_prec_t p = a.precision() > b.precision() ? a.precision() : b.precision();
  Real r = Real::with_precision(p);
  fn(r.raw(), a.raw(), b.raw(), rnd);
  return r;
}

Real dir1(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), const Real& a, mpfr_rnd_t rnd) {
  Real r = Real::with_precision(a.precision());
  fn(r.raw(), a.raw(), rnd);
  return r;
}

}  // namespace

Ivl Ivl::from_rational(const Rational& q, mpfr_prec_t prec) {
  return Ivl(Real::from_rational(q, MPFR_RNDD, pick(prec)),
             Real::from_rational(q, MPFR_RNDU, pick(prec)));
}

Ivl Ivl::pi(mpfr_prec_t prec) {
  return Ivl(Real::pi(MPFR_RNDD, pick(prec)), Real::pi(MPFR_RNDU, pick(prec)));
}

Ivl operator+(const Ivl& a, const Ivl& b) {
  return Ivl(dir2(mpfr_add, a.lo, b.lo, MPFR_RNDD), dir2(mpfr_add, a.hi, b.hi, MPFR_RNDU));
}

Ivl operator-(const Ivl& a, const Ivl& b) {
  return Ivl(dir2(mpfr_sub, a.lo, b.hi, MPFR_RNDD), dir2(mpfr_sub, a.hi, b.lo, MPFR_RNDU));
}

Ivl operator-(const Ivl& a) { return Ivl(-a.hi, -a.lo); }

Ivl operator*(const Ivl& a, const Ivl& b) {
  // Four directed corner products; min/max selection handles all signs.
  Real p1 = dir2(mpfr_mul, a.lo, b.lo, MPFR_RNDD);
  Real p2 = dir2(mpfr_mul, a.lo, b.hi, MPFR_RNDD);
  Real p3 = dir2(mpfr_mul, a.hi, b.lo, MPFR_RNDD);
  Real p4 = dir2(mpfr_mul, a.hi, b.hi, MPFR_RNDD);
  Real lo = min(min(p1, p2), min(p3, p4));
  Real q1 = dir2(mpfr_mul, a.lo, b.lo, MPFR_RNDU);
  Real q2 = dir2(mpfr_mul, a.lo, b.hi, MPFR_RNDU);
  Real q3 = dir2(mpfr_mul, a.hi, b.lo, MPFR_RNDU);
  Real q4 = dir2(mpfr_mul, a.hi, b.hi, MPFR_RNDU);
  Real hi = max(max(q1, q2), max(q3, q4));
  return Ivl(std::move(lo), std::move(hi));
}

Ivl operator/(const Ivl& a, const Ivl& b) {
  if (b.contains_zero()) throw Error("interval division by interval containing zero");
  Real p1 = dir2(mpfr_div, a.lo, b.lo, MPFR_RNDD);
  Real p2 = dir2(mpfr_div, a.lo, b.hi, MPFR_RNDD);
  Real p3 = dir2(mpfr_div, a.hi, b.lo, MPFR_RNDD);
  Real p4 = dir2(mpfr_div, a.hi, b.hi, MPFR_RNDD);
  Real lo = min(min(p1, p2), min(p3, p4));
  Real q1 = dir2(mpfr_div, a.lo, b.lo, MPFR_RNDU);
  Real q2 = dir2(mpfr_div, a.lo, b.hi, MPFR_RNDU);
  Real q3 = dir2(mpfr_div, a.hi, b.lo, MPFR_RNDU);
  Real q4 = dir2(mpfr_div, a.hi, b.hi, MPFR_RNDU);
  Real hi = max(max(q1, q2), max(q3, q4));
  return Ivl(std::move(lo), std::move(hi));
}

Ivl abs(const Ivl& a) {
  if (a.lo.sgn() >= 0) return a;
  if (a.hi.sgn() <= 0) return -a;
  return Ivl(Real(0L), max(-a.lo, a.hi));
}

Ivl sqrt(const Ivl& a) {
  if (a.lo.sgn() < 0) throw Error("interval sqrt of negative interval");
  return Ivl(dir1(mpfr_sqrt, a.lo, MPFR_RNDD), dir1(mpfr_sqrt, a.hi, MPFR_RNDU));
}

Ivl log(const Ivl& a) {
  if (a.lo.sgn() <= 0) throw Error("interval log of non-positive interval");
  return Ivl(dir1(mpfr_log, a.lo, MPFR_RNDD), dir1(mpfr_log, a.hi, MPFR_RNDU));
}

Ivl log1p(const Ivl& a) {
  if (a.lo <= Real(-1L)) throw Error("interval log1p out of domain");
  return Ivl(dir1(mpfr_log1p, a.lo, MPFR_RNDD), dir1(mpfr_log1p, a.hi, MPFR_RNDU));
}

Ivl exp(const Ivl& a) {
  return Ivl(dir1(mpfr_exp, a.lo, MPFR_RNDD), dir1(mpfr_exp, a.hi, MPFR_RNDU));
}

Ivl expm1(const Ivl& a) {
  return Ivl(dir1(mpfr_expm1, a.lo, MPFR_RNDD), dir1(mpfr_expm1, a.hi, MPFR_RNDU));
}

Ivl pow(const Ivl& base, const Ivl& expo) {
  if (!base.is_positive()) throw Error("interval pow requires positive base");
  return exp(expo * log(base));
}

Ivl min(const Ivl& a, const Ivl& b) { return Ivl(min(a.lo, b.lo), min(a.hi, b.hi)); }
Ivl max(const Ivl& a, const Ivl& b) { return Ivl(max(a.lo, b.lo), max(a.hi, b.hi)); }

namespace {

Ivl lipschitz_enclosure(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), const Ivl& a) {
  Real w = dir2(mpfr_sub, a.hi, a.lo, MPFR_RNDU);
  Real f1lo = dir1(fn, a.lo, MPFR_RNDD), f1hi = dir1(fn, a.lo, MPFR_RNDU);
  Real f2lo = dir1(fn, a.hi, MPFR_RNDD), f2hi = dir1(fn, a.hi, MPFR_RNDU);
  Real lo = dir2(mpfr_sub, min(f1lo, f2lo), w, MPFR_RNDD);
  Real hi = dir2(mpfr_add, max(f1hi, f2hi), w, MPFR_RNDU);
  return Ivl(std::move(lo), std::move(hi));
}

}  // namespace

Ivl sin_enclosure(const Ivl& a) {
  return clamp(lipschitz_enclosure(mpfr_sin, a), Real(-1L), Real(1L));
}

Ivl cos_enclosure(const Ivl& a) {
  return clamp(lipschitz_enclosure(mpfr_cos, a), Real(-1L), Real(1L));
}

Ivl clamp(const Ivl& a, const Real& lo, const Real& hi) {
  return Ivl(max(a.lo, lo), min(a.hi, hi));
}

}  // namespace frameforge
