#pragma once

#include "frameforge/numeric.hpp"

namespace frameforge {

// Closed interval [lo, hi] with outward-rounded arithmetic. Every
// certified bound in the library flows through this type: an inequality
// is accepted only when it holds between the pessimistic endpoints.
struct Ivl {
  Real lo, hi;

  Ivl() = default;
  // Exact singleton; no rounding happens on construction.
  explicit Ivl(const Real& x) : lo(x), hi(x) {}
  Ivl(Real l, Real h) : lo(std::move(l)), hi(std::move(h)) {}

  static Ivl of(double x) { return Ivl(Real(x)); }
  static Ivl of_int(long x) { return Ivl(Real(x)); }
  static Ivl exact_big(const BigInt& z) { return Ivl(Real(z)); }
  // Directed conversion of p/q.
  static Ivl from_rational(const Rational& q, mpfr_prec_t prec = 0);
  static Ivl pi(mpfr_prec_t prec = 0);

  bool contains_zero() const { return lo.sgn() <= 0 && hi.sgn() >= 0; }
  bool is_positive() const { return lo.sgn() > 0; }
  bool is_nonnegative() const { return lo.sgn() >= 0; }
  Real width() const { return hi - lo; }
  Real mid() const { return (lo + hi) * Real(0.5); }

  // True only when the inequality is certain.
  bool certainly_less(const Ivl& o) const { return hi < o.lo; }
  bool certainly_greater(const Ivl& o) const { return lo > o.hi; }
};

Ivl operator+(const Ivl& a, const Ivl& b);
Ivl operator-(const Ivl& a, const Ivl& b);
Ivl operator-(const Ivl& a);
Ivl operator*(const Ivl& a, const Ivl& b);
// Throws Error when b straddles zero.
Ivl operator/(const Ivl& a, const Ivl& b);

Ivl abs(const Ivl& a);
Ivl sqrt(const Ivl& a);
Ivl log(const Ivl& a);
Ivl log1p(const Ivl& a);
Ivl exp(const Ivl& a);
Ivl expm1(const Ivl& a);
// Base must be strictly positive.
Ivl pow(const Ivl& base, const Ivl& expo);
Ivl min(const Ivl& a, const Ivl& b);
Ivl max(const Ivl& a, const Ivl& b);
// Enclosures of sin/cos on the interval, via endpoint values widened by
// the interval width (|derivative| <= 1). Tight for the near-point
// intervals this library produces.
Ivl sin_enclosure(const Ivl& a);
Ivl cos_enclosure(const Ivl& a);
// Intersection with a known a-priori range, for structural clamps.
Ivl clamp(const Ivl& a, const Real& lo, const Real& hi);

}  // namespace frameforge
