#include "frameforge/trigpoly.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>

#include "frameforge/errors.hpp"

namespace frameforge {

Real zero_prune_threshold() {
  Real t(1L);
  mpfr_mul_2si(t.raw(), t.raw(), -(default_precision() - 8), MPFR_RNDN);
  return t;
}

namespace {

bool negligible(const Cplx& c) {
  static thread_local Real cached = zero_prune_threshold();
  static thread_local mpfr_prec_t cached_prec = default_precision();
  if (cached_prec != default_precision()) {
    cached = zero_prune_threshold();
    cached_prec = default_precision();
  }
  return hypot(c.re, c.im) < cached;
}

}  // namespace

TrigPoly TrigPoly::constant(const Real& c) { return constant(Cplx(c)); }

TrigPoly TrigPoly::constant(const Cplx& c) {
  TrigPoly p;
  p.set_term(Freq(0), c);
  return p;
}

void TrigPoly::add_term(const Freq& f, const Cplx& c) {
  auto it = terms_.find(f);
  if (it == terms_.end()) {
    if (!negligible(c)) terms_.emplace(f, c);
    return;
  }
  it->second = it->second + c;
  if (negligible(it->second)) terms_.erase(it);
}

void TrigPoly::set_term(const Freq& f, const Cplx& c) {
  if (negligible(c)) {
    terms_.erase(f);
  } else {
    terms_.insert_or_assign(f, c);
  }
}

Cplx TrigPoly::coeff(const Freq& f) const {
  auto it = terms_.find(f);
  return it == terms_.end() ? Cplx() : it->second;
}

Freq TrigPoly::degree() const {
  Freq d(0);
  for (const auto& [f, c] : terms_) {
    Freq a = rat_abs(f);
    if (a > d) d = a;
  }
  return d;
}

bool TrigPoly::is_real() const {
  // Symmetric term pairs can differ by rounding from unordered
  // accumulation, so equality is tested against the prune threshold.
  Real tol = zero_prune_threshold() * Real(4L);
  for (const auto& [f, c] : terms_) {
    Cplx mirror = coeff(Freq(-f)).conj();
    if (hypot(c.re - mirror.re, c.im - mirror.im) > tol * (Real(1L) + c.abs())) return false;
  }
  return true;
}

bool TrigPoly::is_analytic() const {
  return terms_.empty() || terms_.begin()->first >= 0;
}

bool TrigPoly::has_integer_spectrum() const {
  for (const auto& [f, c] : terms_)
    if (!is_integer(f)) return false;
  return true;
}

TrigPoly add(const TrigPoly& a, const TrigPoly& b) {
  TrigPoly out = a;
  for (const auto& [f, c] : b.terms()) out.add_term(f, c);
  return out;
}

TrigPoly sub(const TrigPoly& a, const TrigPoly& b) {
  TrigPoly out = a;
  for (const auto& [f, c] : b.terms()) out.add_term(f, -c);
  return out;
}

TrigPoly scale(const TrigPoly& a, const Cplx& c) {
  TrigPoly out;
  for (const auto& [f, v] : a.terms()) out.set_term(f, v * c);
  return out;
}

TrigPoly scale(const TrigPoly& a, const Real& c) { return scale(a, Cplx(c)); }

TrigPoly mul_direct(const TrigPoly& a, const TrigPoly& b) {
  TrigPoly out;
  for (const auto& [fa, ca] : a.terms())
    for (const auto& [fb, cb] : b.terms()) out.add_term(Freq(fa + fb), ca * cb);
  return out;
}

namespace {

long freq_to_long(const Freq& f) {
  BigInt n = rat_num(f);
  if (n < std::numeric_limits<long>::min() / 4 || n > std::numeric_limits<long>::max() / 4)
    throw Error("integer frequency too large for FFT path");
  return static_cast<long>(n);
}

}  // namespace

TrigPoly mul_fft(const TrigPoly& a, const TrigPoly& b) {
  if (!a.has_integer_spectrum() || !b.has_integer_spectrum())
    throw Error("mul_fft requires integer spectra");
  if (a.empty() || b.empty()) return TrigPoly();

  long amin = freq_to_long(a.terms().begin()->first);
  long amax = freq_to_long(a.terms().rbegin()->first);
  long bmin = freq_to_long(b.terms().begin()->first);
  long bmax = freq_to_long(b.terms().rbegin()->first);
  std::size_t la = static_cast<std::size_t>(amax - amin) + 1;
  std::size_t lb = static_cast<std::size_t>(bmax - bmin) + 1;
  std::size_t need = la + lb - 1;
  std::size_t m = 1;
  while (m < need) m <<= 1;

  auto alloc = [m]() {
    return static_cast<fftwl_complex*>(fftwl_malloc(sizeof(fftwl_complex) * m));
  };
  fftwl_complex* fa = alloc();
  fftwl_complex* fb = alloc();
  std::fill_n(&fa[0][0], 2 * m, 0.0L);
  std::fill_n(&fb[0][0], 2 * m, 0.0L);

  long double amag = 0.0L, bmag = 0.0L;
  for (const auto& [f, c] : a.terms()) {
    std::size_t i = static_cast<std::size_t>(freq_to_long(f) - amin);
    fa[i][0] = c.re.to_long_double();
    fa[i][1] = c.im.to_long_double();
    amag = std::max(amag, std::abs(fa[i][0]) + std::abs(fa[i][1]));
  }
  for (const auto& [f, c] : b.terms()) {
    std::size_t i = static_cast<std::size_t>(freq_to_long(f) - bmin);
    fb[i][0] = c.re.to_long_double();
    fb[i][1] = c.im.to_long_double();
    bmag = std::max(bmag, std::abs(fb[i][0]) + std::abs(fb[i][1]));
  }

  // FFTW_ESTIMATE keeps plans deterministic run to run.
  fftwl_plan pa = fftwl_plan_dft_1d(static_cast<int>(m), fa, fa, FFTW_FORWARD, FFTW_ESTIMATE);
  fftwl_execute(pa);
  fftwl_destroy_plan(pa);
  fftwl_plan pb = fftwl_plan_dft_1d(static_cast<int>(m), fb, fb, FFTW_FORWARD, FFTW_ESTIMATE);
  fftwl_execute(pb);
  fftwl_destroy_plan(pb);

  for (std::size_t i = 0; i < m; ++i) {
    long double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    long double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftwl_plan pi = fftwl_plan_dft_1d(static_cast<int>(m), fa, fa, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftwl_execute(pi);
  fftwl_destroy_plan(pi);

  // Spurious terms from FFT round-off sit ~1e-18 relative; prune two
  // decades below the documented 1e-12 agreement tolerance.
  long double floor_mag = amag * bmag * 1e-14L;
  long double inv = 1.0L / static_cast<long double>(m);
  TrigPoly out;
  long base = amin + bmin;
  for (std::size_t i = 0; i < need; ++i) {
    long double re = fa[i][0] * inv;
    long double im = fa[i][1] * inv;
    if (std::abs(re) + std::abs(im) <= floor_mag) continue;
    out.set_term(Freq(base + static_cast<long>(i)),
                 Cplx(Real(static_cast<double>(re)), Real(static_cast<double>(im))));
  }
  fftwl_free(fa);
  fftwl_free(fb);
  return out;
}

TrigPoly mul(const TrigPoly& a, const TrigPoly& b) {
  if (a.support_size() + b.support_size() > kFftSupportThreshold &&
      a.has_integer_spectrum() && b.has_integer_spectrum()) {
    return mul_fft(a, b);
  }
  return mul_direct(a, b);
}

TrigPoly dilate(const TrigPoly& p, const BigInt& nu) {
  if (nu < 1) throw Error("dilate requires nu >= 1");
  TrigPoly out;
  for (const auto& [f, c] : p.terms()) out.set_term(Freq(f * nu), c);
  return out;
}

TrigPoly partial_sum(const TrigPoly& p, const Rational& r) {
  TrigPoly out;
  for (const auto& [f, c] : p.terms())
    if (rat_abs(f) <= r) out.set_term(f, c);
  return out;
}

Real coeff_norm(const TrigPoly& poly, double p) {
  if (std::isinf(p)) {
    Real m(0L);
    for (const auto& [f, c] : poly.terms()) m = max(m, c.abs());
    return m;
  }
  if (p < 1.0) throw Error("coeff_norm requires p >= 1");
  Real sum(0L);
  if (p == 1.0) {
    for (const auto& [f, c] : poly.terms()) sum += c.abs();
    return sum;
  }
  if (p == 2.0) {
    for (const auto& [f, c] : poly.terms()) sum += c.re * c.re + c.im * c.im;
    return sqrt(sum);
  }
  Real rp(p);
  for (const auto& [f, c] : poly.terms()) sum += pow(c.abs(), rp);
  return pow(sum, Real(1L) / rp);
}

Cplx evaluate(const TrigPoly& poly, const Real& t) {
  Cplx acc;
  Real two_pi = Real(2L) * Real::pi();
  for (const auto& [f, c] : poly.terms()) {
    Real theta = two_pi * Real::from_rational(f) * t;
    Cplx e(cos(theta), sin(theta));
    acc = acc + c * e;
  }
  return acc;
}

BigInt FactoredProduct::factor_count() const {
  BigInt n = 0;
  for (const auto& r : runs) n += r.count;
  return n;
}

void FactoredProduct::validate() const {
  if (nu < 2) throw Error("FactoredProduct base nu must be >= 2");
  for (const auto& r : runs) {
    if (r.count < 1) throw Error("FactoredProduct run count must be positive");
    if (!r.poly.has_integer_spectrum())
      throw Error("FactoredProduct factors must have integer spectrum");
    Freq d = r.poly.degree();
    if (Rational(nu) <= 2 * d)
      throw Error("FactoredProduct requires nu > 2*deg for every factor");
  }
}

TrigPoly expand(const FactoredProduct& f, std::size_t cap) {
  f.validate();
  double log_terms = 0.0;
  for (const auto& r : f.runs) {
    double per = std::log(2.0 * rat_num(r.poly.degree()).convert_to<double>() /
                              rat_den(r.poly.degree()).convert_to<double>() +
                          1.0);
    log_terms += per * r.count.convert_to<double>();
    if (log_terms > std::log(static_cast<double>(cap)) + 1e-9)
      throw CapExceeded("expansion term estimate exceeds cap");
  }

  TrigPoly acc = TrigPoly::constant(Real(1L));
  BigInt power = 1;
  for (const auto& r : f.runs) {
    for (BigInt j = 0; j < r.count; ++j) {
      acc = mul(acc, dilate(r.poly, power));
      power *= f.nu;
      if (acc.support_size() > cap) throw CapExceeded("expansion exceeded cap");
    }
  }
  return acc;
}

Cplx FactoredNorm::zero_coeff() const {
  Real r = exp(log_abs_zero);
  return Cplx(r * cos(zero_arg), r * sin(zero_arg));
}

FactoredNorm factored_norm(const FactoredProduct& f, double p) {
  f.validate();
  FactoredNorm out{Real(0L), Real(0L), Real(0L)};
  bool zero_vanishes = false;
  for (const auto& r : f.runs) {
    Real nrm = coeff_norm(r.poly, p);
    if (nrm.is_zero()) {
      out.log_norm = -Real::pos_inf();
      return out;
    }
    Real cnt(r.count);
    out.log_norm += cnt * log(nrm);
    Cplx z = r.poly.coeff(Freq(0));
    if (z.is_zero()) {
      zero_vanishes = true;
      continue;
    }
    out.log_abs_zero += cnt * log(z.abs());
    Real arg = Real::with_precision(z.re.precision());
    mpfr_atan2(arg.raw(), z.im.raw(), z.re.raw(), MPFR_RNDN);
    out.zero_arg += cnt * arg;
  }
  if (zero_vanishes) out.log_abs_zero = -Real::pos_inf();
  return out;
}

}  // namespace frameforge
