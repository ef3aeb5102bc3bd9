#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

#include "frameforge/rational.hpp"

namespace frameforge {

// Process-wide default mantissa precision in bits. Individual Real values
// remember the precision they were created with.
mpfr_prec_t default_precision();
void set_default_precision(mpfr_prec_t bits);

// RAII wrapper around one mpfr_t. Arithmetic rounds to nearest at the
// larger precision of the operands; directed rounding lives in Ivl.
class Real {
public:
  Real() { mpfr_init2(v_, default_precision()); mpfr_set_zero(v_, 1); }
  explicit Real(double x) : Real() { mpfr_set_d(v_, x, MPFR_RNDN); }
  explicit Real(long x) : Real() { mpfr_set_si(v_, x, MPFR_RNDN); }
  explicit Real(int x) : Real(static_cast<long>(x)) {}
  explicit Real(const BigInt& z);

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  static Real with_precision(mpfr_prec_t bits) {
    Real r(tag{}, bits);
    mpfr_set_zero(r.v_, 1);
    return r;
  }
  // prec == 0 means the current default.
  static Real from_rational(const Rational& q, mpfr_rnd_t rnd = MPFR_RNDN,
                            mpfr_prec_t prec = 0);
  static Real pi(mpfr_rnd_t rnd = MPFR_RNDN, mpfr_prec_t prec = 0);
  static Real pos_inf() { Real r; mpfr_set_inf(r.v_, 1); return r; }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  int sgn() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_); }
  bool is_inf() const { return mpfr_inf_p(v_); }
  bool is_nan() const { return mpfr_nan_p(v_); }
  bool is_finite() const { return mpfr_number_p(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  BigInt to_bigint_floor() const;
  BigInt to_bigint_ceil() const;
  // Exact decode of a finite value as m/2^k.
  Rational to_rational_exact() const;
  // "mantissa:exponent" form, exact; "0" for zero.
  std::string mantissa_exp_str() const;
  // Decimal string; digits == 0 picks enough digits to round-trip.
  std::string str(int digits = 0) const;

  friend Real operator-(const Real& a) {
    Real r(tag{}, a.precision());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator+(const Real& a, const Real& b) {
    Real r(tag{}, joint(a, b));
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a, const Real& b) {
    Real r(tag{}, joint(a, b));
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, const Real& b) {
    Real r(tag{}, joint(a, b));
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(const Real& a, const Real& b) {
    Real r(tag{}, joint(a, b));
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  Real& operator+=(const Real& b) { mpfr_add(v_, v_, b.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& b) { mpfr_sub(v_, v_, b.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& b) { mpfr_mul(v_, v_, b.v_, MPFR_RNDN); return *this; }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_); }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_); }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_); }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_); }
  friend bool operator!=(const Real& a, const Real& b) { return !mpfr_equal_p(a.v_, b.v_); }

private:
  struct tag {};
  Real(tag, mpfr_prec_t bits) { mpfr_init2(v_, bits); }
  static mpfr_prec_t joint(const Real& a, const Real& b) {
    return a.precision() > b.precision() ? a.precision() : b.precision();
  }
  mpfr_t v_;

  friend Real unary_op(int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), const Real&);
  friend Real binary_op(int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t),
                        const Real&, const Real&);
};

Real abs(const Real& a);
Real sqrt(const Real& a);
Real log(const Real& a);
Real log1p(const Real& a);
Real exp(const Real& a);
Real expm1(const Real& a);
Real pow(const Real& a, const Real& b);
Real hypot(const Real& a, const Real& b);
Real sin(const Real& a);
Real cos(const Real& a);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);

}  // namespace frameforge
