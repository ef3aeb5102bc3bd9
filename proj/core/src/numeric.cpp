#include "frameforge/numeric.hpp"

#include <gmp.h>

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <vector>

namespace frameforge {

namespace {
std::atomic<mpfr_prec_t> g_default_prec{128};

mpfr_prec_t pick(mpfr_prec_t prec) { return prec > 0 ? prec : default_precision(); }
}  // namespace

mpfr_prec_t default_precision() { return g_default_prec.load(); }

void set_default_precision(mpfr_prec_t bits) {
  if (bits < 64) throw Error("precision must be at least 64 bits");
  g_default_prec.store(bits);
}

Real::Real(const BigInt& z) {
  // Precision covers the full bit length, so the conversion is exact.
  BigInt az = z < 0 ? BigInt(-z) : z;
  std::size_t bits = z == 0 ? 1 : boost::multiprecision::msb(az) + 1;
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits);
  if (prec < static_cast<mpfr_prec_t>(default_precision())) prec = default_precision();
  mpfr_init2(v_, prec);
  std::string s = z.str();
  mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN);
}

Real Real::from_rational(const Rational& q, mpfr_rnd_t rnd, mpfr_prec_t prec) {
  Real num(rat_num(q));
  Real den(rat_den(q));
  Real r(tag{}, pick(prec));
  mpfr_div(r.v_, num.v_, den.v_, rnd);
  return r;
}

Real Real::pi(mpfr_rnd_t rnd, mpfr_prec_t prec) {
  Real r(tag{}, pick(prec));
  mpfr_const_pi(r.v_, rnd);
  return r;
}

BigInt Real::to_bigint_floor() const {
  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, v_, MPFR_RNDD);
  char* s = mpz_get_str(nullptr, 10, z);
  BigInt out(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, std::strlen(s) + 1);
  mpz_clear(z);
  return out;
}

BigInt Real::to_bigint_ceil() const {
  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, v_, MPFR_RNDU);
  char* s = mpz_get_str(nullptr, 10, z);
  BigInt out(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, std::strlen(s) + 1);
  mpz_clear(z);
  return out;
}

Rational Real::to_rational_exact() const {
  if (!is_finite()) throw Error("to_rational_exact on non-finite value");
  if (is_zero()) return Rational(0);
  mpz_t z;
  mpz_init(z);
  mpfr_exp_t e = mpfr_get_z_2exp(z, v_);
  char* s = mpz_get_str(nullptr, 10, z);
  BigInt m(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, std::strlen(s) + 1);
  mpz_clear(z);
  Rational out(m);
  if (e >= 0) {
    out *= Rational(BigInt(1) << static_cast<unsigned>(e));
  } else {
    out /= Rational(BigInt(1) << static_cast<unsigned>(-e));
  }
  return out;
}

std::string Real::mantissa_exp_str() const {
  if (is_zero()) return "0";
  if (!is_finite()) return is_nan() ? "nan" : (sgn() > 0 ? "inf" : "-inf");
  mpz_t z;
  mpz_init(z);
  mpfr_exp_t e = mpfr_get_z_2exp(z, v_);
  char* s = mpz_get_str(nullptr, 10, z);
  std::string out(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, std::strlen(s) + 1);
  mpz_clear(z);
  out += ":";
  out += std::to_string(static_cast<long long>(e));
  return out;
}

std::string Real::str(int digits) const {
  if (is_nan()) return "nan";
  if (is_inf()) return sgn() > 0 ? "inf" : "-inf";
  if (digits <= 0) {
    // Enough decimal digits to reproduce the binary value exactly.
    digits = static_cast<int>(std::ceil(static_cast<double>(precision()) * 0.30103)) + 2;
  }
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Real unary_op(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), const Real& a) {
  Real r(Real::tag{}, a.precision());
  fn(r.v_, a.v_, MPFR_RNDN);
  return r;
}

Real binary_op(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t),
               const Real& a, const Real& b) {
  Real r(Real::tag{}, Real::joint(a, b));
  fn(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real abs(const Real& a) { return unary_op(mpfr_abs, a); }
Real sqrt(const Real& a) { return unary_op(mpfr_sqrt, a); }
Real log(const Real& a) { return unary_op(mpfr_log, a); }
Real log1p(const Real& a) { return unary_op(mpfr_log1p, a); }
Real exp(const Real& a) { return unary_op(mpfr_exp, a); }
Real expm1(const Real& a) { return unary_op(mpfr_expm1, a); }
Real sin(const Real& a) { return unary_op(mpfr_sin, a); }
Real cos(const Real& a) { return unary_op(mpfr_cos, a); }
Real pow(const Real& a, const Real& b) { return binary_op(mpfr_pow, a, b); }
Real hypot(const Real& a, const Real& b) { return binary_op(mpfr_hypot, a, b); }
Real min(const Real& a, const Real& b) { return binary_op(mpfr_min, a, b); }
Real max(const Real& a, const Real& b) { return binary_op(mpfr_max, a, b); }

std::string Dyadic::str() const {
  std::ostringstream os;
  os << m << "*2^" << e;
  return os.str();
}

std::string rat_str(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

Rational rat_parse(const std::string& s) {
  if (s.empty()) throw Error("empty rational literal");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+'))
      throw Error("malformed rational literal: " + s);
  }
  try {
    Rational q(s);
    return q;
  } catch (const std::exception&) {
    throw Error("malformed rational literal: " + s);
  }
}

BigInt rat_floor(const Rational& q) {
  BigInt n = rat_num(q), d = rat_den(q);
  BigInt quo = n / d;
  if (n < 0 && quo * d != n) --quo;
  return quo;
}

}  // namespace frameforge
