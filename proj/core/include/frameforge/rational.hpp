#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "frameforge/errors.hpp"

namespace frameforge {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Frequencies are exact rationals so spectrum disjointness and gap
// computations are decidable.
using Freq = Rational;

inline Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline bool is_integer(const Rational& q) {
  return boost::multiprecision::denominator(q) == 1;
}

inline BigInt rat_num(const Rational& q) {
  return boost::multiprecision::numerator(q);
}
inline BigInt rat_den(const Rational& q) {
  return boost::multiprecision::denominator(q);
}

// Canonical text form: "p" for integers, "p/q" otherwise.
std::string rat_str(const Rational& q);

// Parses "p", "p/q", optional sign. Throws Error on malformed input.
Rational rat_parse(const std::string& s);

// Floor division helper for rationals.
BigInt rat_floor(const Rational& q);

// An exact dyadic number m * 2^e. Closed under +, -, *; used for
// brute-force identity checks where floating error must be zero.
struct Dyadic {
  BigInt m;
  std::int64_t e = 0;

  Dyadic() : m(0) {}
  Dyadic(BigInt mm, std::int64_t ee) : m(std::move(mm)), e(ee) { normalize(); }
  static Dyadic from_int(long v) { return Dyadic(BigInt(v), 0); }

  void normalize() {
    if (m == 0) { e = 0; return; }
    while ((m & 1) == 0) { m >>= 1; ++e; }
  }
  bool is_zero() const { return m == 0; }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.e >= b.e) return Dyadic(BigInt(a.m << static_cast<unsigned>(a.e - b.e)) + b.m, b.e);
    return Dyadic(a.m + BigInt(b.m << static_cast<unsigned>(b.e - a.e)), a.e);
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    return a + Dyadic(-b.m, b.e);
  }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero() || b.is_zero()) return Dyadic();
    return Dyadic(a.m * b.m, a.e + b.e);
  }
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.m == b.m && a.e == b.e;
  }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }

  std::string str() const;
};

// Exact complex number with dyadic parts.
struct DyadicCplx {
  Dyadic re, im;
  friend DyadicCplx operator+(const DyadicCplx& a, const DyadicCplx& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend DyadicCplx operator-(const DyadicCplx& a, const DyadicCplx& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend DyadicCplx operator*(const DyadicCplx& a, const DyadicCplx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const DyadicCplx& a, const DyadicCplx& b) {
    return a.re == b.re && a.im == b.im;
  }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

}  // namespace frameforge
