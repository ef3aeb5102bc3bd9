#pragma once

#include "frameforge/numeric.hpp"

namespace frameforge {

// Complex number over Real. std::complex over a non-trivial type is
// undefined behavior, hence this small dedicated struct.
struct Cplx {
  Real re, im;

  Cplx() = default;
  explicit Cplx(Real r) : re(std::move(r)) {}
  Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  static Cplx of(double r, double i = 0.0) { return Cplx(Real(r), Real(i)); }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  friend Cplx operator+(const Cplx& a, const Cplx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cplx operator-(const Cplx& a, const Cplx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cplx operator-(const Cplx& a) { return {-a.re, -a.im}; }
  friend Cplx operator*(const Cplx& a, const Cplx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cplx operator*(const Real& s, const Cplx& a) { return {s * a.re, s * a.im}; }

  Cplx conj() const { return {re, -im}; }
  Real abs() const { return hypot(re, im); }
  Real abs_upper() const { return frameforge::abs(re) + frameforge::abs(im); }
};

}  // namespace frameforge
