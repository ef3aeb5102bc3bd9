#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "frameforge/errors.hpp"
#include "frameforge/trigpoly.hpp"

using namespace frameforge;

namespace {

// Reference convolution over double-precision complex maps, written
// without any TrigPoly machinery so the two multiply paths are checked
// against a third, independent route.
using RefPoly = std::map<BigInt, std::complex<double>>;

RefPoly ref_mul(const RefPoly& a, const RefPoly& b) {
  RefPoly out;
  for (const auto& [fa, ca] : a)
    for (const auto& [fb, cb] : b) out[fa + fb] += ca * cb;
  return out;
}

RefPoly to_ref(const TrigPoly& p) {
  RefPoly out;
  for (const auto& [f, c] : p.terms()) {
    REQUIRE(is_integer(f));
    out[rat_num(f)] = {c.re.to_double(), c.im.to_double()};
  }
  return out;
}

double ref_dist(const RefPoly& a, const RefPoly& b) {
  double d = 0.0;
  for (const auto& [f, c] : a) {
    auto it = b.find(f);
    std::complex<double> other = it == b.end() ? 0.0 : it->second;
    d = std::max(d, std::abs(c - other));
  }
  for (const auto& [f, c] : b)
    if (!a.count(f)) d = std::max(d, std::abs(c));
  return d;
}

TrigPoly one_plus_cos() {
  TrigPoly f;
  f.set_term(Freq(0), Cplx::of(1.0));
  f.set_term(Freq(1), Cplx::of(0.5));
  f.set_term(Freq(-1), Cplx::of(0.5));
  return f;
}

TrigPoly random_poly(std::mt19937& rng, int max_deg) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(0, max_deg);
  TrigPoly p;
  int d = deg(rng);
  for (int n = -d; n <= d; ++n) p.set_term(Freq(n), Cplx::of(amp(rng), amp(rng)));
  return p;
}

}  // namespace

TEST_CASE("term map basics") {
  TrigPoly p;
  CHECK(p.empty());
  CHECK(p.degree() == Freq(0));

  p.set_term(Freq(Rational(3, 2)), Cplx::of(2.0));
  p.set_term(Freq(-4), Cplx::of(0.0, 1.0));
  CHECK(p.support_size() == 2);
  CHECK(p.degree() == Freq(4));
  CHECK(!p.has_integer_spectrum());

  p.add_term(Freq(Rational(3, 2)), Cplx::of(-2.0));
  CHECK(p.support_size() == 1);  // cancelled term is pruned
  CHECK(p.has_integer_spectrum());

  p.set_term(Freq(-4), Cplx::of(0.0));
  CHECK(p.empty());
}

TEST_CASE("squaring one plus cosine matches the hand expansion") {
  TrigPoly f = one_plus_cos();
  TrigPoly sq = mul(f, f);

  // (1 + cos 2 pi t)^2 = 3/2 + 2 cos + (1/2) cos 2, all dyadic, so the
  // double comparisons below are exact.
  CHECK(sq.support_size() == 5);
  CHECK(sq.coeff(Freq(0)).re.to_double() == 1.5);
  CHECK(sq.coeff(Freq(1)).re.to_double() == 1.0);
  CHECK(sq.coeff(Freq(-1)).re.to_double() == 1.0);
  CHECK(sq.coeff(Freq(2)).re.to_double() == 0.25);
  CHECK(sq.coeff(Freq(-2)).re.to_double() == 0.25);
  for (const auto& [f2, c] : sq.terms()) CHECK(c.im.to_double() == 0.0);
  CHECK(sq.is_real());
  CHECK(!sq.is_analytic());
}

TEST_CASE("real and analytic predicates") {
  TrigPoly f = one_plus_cos();
  CHECK(f.is_real());

  TrigPoly g = f;
  g.set_term(Freq(-1), Cplx::of(0.25));
  CHECK(!g.is_real());

  TrigPoly h;
  h.set_term(Freq(0), Cplx::of(1.0));
  h.set_term(Freq(5), Cplx::of(0.0, -2.0));
  CHECK(h.is_analytic());
  CHECK(!f.is_analytic());
}

TEST_CASE("multiply paths agree with the reference convolution") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    TrigPoly a = random_poly(rng, 6);
    TrigPoly b = random_poly(rng, 6);
    RefPoly want = ref_mul(to_ref(a), to_ref(b));

    CHECK(ref_dist(to_ref(mul_direct(a, b)), want) < 1e-12);
    CHECK(ref_dist(to_ref(mul_fft(a, b)), want) < 1e-12);
    CHECK(ref_dist(to_ref(mul(a, b)), want) < 1e-12);
  }
}

TEST_CASE("direct and fft multiplies agree at large degree") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  TrigPoly a, b;
  for (int n = -5000; n <= 5000; n += 2) a.set_term(Freq(n), Cplx::of(amp(rng), amp(rng)));
  for (int n = -5000; n <= 5000; n += 3) b.set_term(Freq(n), Cplx::of(amp(rng), amp(rng)));
  CHECK(a.support_size() + b.support_size() > kFftSupportThreshold);

  TrigPoly d = mul_direct(a, b);
  TrigPoly f = mul_fft(a, b);
  CHECK(d.support_size() == f.support_size());
  double scale = coeff_norm(d, kSupNorm).to_double();
  double worst = 0.0;
  for (const auto& [fr, c] : d.terms()) {
    Cplx diff = c - f.coeff(fr);
    worst = std::max(worst, diff.abs().to_double());
  }
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("fractional frequencies multiply exactly") {
  TrigPoly a, b;
  a.set_term(Freq(Rational(1, 3)), Cplx::of(1.0));
  a.set_term(Freq(Rational(-1, 3)), Cplx::of(1.0));
  b.set_term(Freq(Rational(1, 2)), Cplx::of(1.0));
  TrigPoly p = mul(a, b);
  CHECK(p.support_size() == 2);
  CHECK(p.coeff(Freq(Rational(5, 6))).re.to_double() == 1.0);
  CHECK(p.coeff(Freq(Rational(1, 6))).re.to_double() == 1.0);
}

TEST_CASE("coefficient norms match hand computation") {
  TrigPoly f = one_plus_cos();
  CHECK(coeff_norm(f, 1.0).to_double() == 2.0);
  CHECK(coeff_norm(f, kSupNorm).to_double() == 1.0);

  double p = 1.8;
  double want = std::pow(1.0 + 2.0 * std::pow(0.5, p), 1.0 / p);
  CHECK(std::abs(coeff_norm(f, p).to_double() - want) < 1e-15);

  // p = 2 norm of the square, from the hand expansion above.
  double l2 = std::sqrt(1.5 * 1.5 + 2.0 + 2.0 * 0.25 * 0.25);
  CHECK(std::abs(coeff_norm(mul(f, f), 2.0).to_double() - l2) < 1e-15);

  CHECK(coeff_norm(TrigPoly(), 1.0).to_double() == 0.0);
}

TEST_CASE("evaluate matches a direct cosine sum") {
  TrigPoly f = one_plus_cos();
  TrigPoly sq = mul(f, f);
  for (double t : {0.0, 0.125, 1.0 / 3.0, 0.7, -2.25}) {
    double base = 1.0 + std::cos(2.0 * M_PI * t);
    Cplx v = evaluate(sq, Real(t));
    CHECK(std::abs(v.re.to_double() - base * base) < 1e-13);
    CHECK(std::abs(v.im.to_double()) < 1e-13);
  }

  // Nonneg frequencies only: value at 0 is the coefficient sum.
  TrigPoly g;
  g.set_term(Freq(2), Cplx::of(0.5, 0.25));
  g.set_term(Freq(0), Cplx::of(-1.0));
  Cplx at0 = evaluate(g, Real(0.0));
  CHECK(std::abs(at0.re.to_double() + 0.5) < 1e-15);
  CHECK(std::abs(at0.im.to_double() - 0.25) < 1e-15);
}

TEST_CASE("dilate rescales the spectrum and keeps coefficients") {
  TrigPoly f = one_plus_cos();
  TrigPoly d = dilate(f, BigInt(37));
  CHECK(d.support_size() == 3);
  CHECK(d.coeff(Freq(37)).re.to_double() == 0.5);
  CHECK(d.coeff(Freq(-37)).re.to_double() == 0.5);
  CHECK(d.coeff(Freq(0)).re.to_double() == 1.0);
  CHECK(d.degree() == Freq(37));
}

TEST_CASE("partial sum keeps exactly the low band") {
  TrigPoly f;
  for (int n = -6; n <= 6; ++n) f.set_term(Freq(n), Cplx::of(1.0));
  TrigPoly low = partial_sum(f, Rational(3));
  CHECK(low.support_size() == 7);
  CHECK(low.degree() == Freq(3));
  // Boundary is inclusive; a half-step cutoff drops the band edge.
  CHECK(partial_sum(f, Rational(5, 2)).degree() == Freq(2));
}

namespace {

// Independent expansion of a dilation product: enumerate index tuples
// factor by factor, tracking frequencies as exact integers. No TrigPoly
// arithmetic is involved.
RefPoly ref_expand(const FactoredProduct& fp) {
  RefPoly acc;
  acc[BigInt(0)] = 1.0;
  BigInt power = 1;
  for (const auto& run : fp.runs) {
    RefPoly factor = to_ref(run.poly);
    for (BigInt j = 0; j < run.count; ++j) {
      RefPoly next;
      for (const auto& [f, c] : acc)
        for (const auto& [k, a] : factor) next[f + k * power] += c * a;
      acc = std::move(next);
      power *= fp.nu;
    }
  }
  return acc;
}

FactoredProduct random_product(std::mt19937& rng) {
  std::uniform_int_distribution<int> nruns(1, 3);
  std::uniform_int_distribution<int> count(1, 2);
  FactoredProduct fp;
  int runs = nruns(rng);
  BigInt maxdeg = 0;
  for (int r = 0; r < runs; ++r) {
    TrigPoly p = random_poly(rng, 3);
    if (p.empty()) p.set_term(Freq(0), Cplx::of(1.0));
    maxdeg = std::max(maxdeg, rat_num(p.degree()));
    fp.runs.push_back({p, BigInt(count(rng))});
  }
  fp.nu = std::max(BigInt(2), BigInt(2 * maxdeg + 1));
  return fp;
}

}  // namespace

TEST_CASE("factored product expansion matches the tuple enumeration") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    FactoredProduct fp = random_product(rng);
    fp.validate();
    TrigPoly full = expand(fp);
    CHECK(ref_dist(to_ref(full), ref_expand(fp)) < 1e-11);
  }
}

TEST_CASE("factored norm is multiplicative over factors") {
  std::mt19937 rng(4242);
  for (double p : {1.0, 1.5, 2.0}) {
    for (int trial = 0; trial < 12; ++trial) {
      FactoredProduct fp = random_product(rng);
      TrigPoly full = expand(fp);
      FactoredNorm fn = factored_norm(fp, p);

      double want = coeff_norm(full, p).to_double();
      CHECK(std::abs(fn.norm().to_double() - want) < 1e-11 * std::max(1.0, want));

      Cplx z0 = full.coeff(Freq(0));
      Cplx zf = fn.zero_coeff();
      CHECK(std::abs(z0.re.to_double() - zf.re.to_double()) < 1e-11);
      CHECK(std::abs(z0.im.to_double() - zf.im.to_double()) < 1e-11);
    }
  }
}

TEST_CASE("factored norm handles vanishing zero coefficients") {
  TrigPoly nomean;
  nomean.set_term(Freq(1), Cplx::of(0.5));
  nomean.set_term(Freq(-1), Cplx::of(0.5));
  FactoredProduct fp{BigInt(3), {{nomean, BigInt(2)}}};
  FactoredNorm fn = factored_norm(fp, 1.0);
  CHECK(fn.log_abs_zero.to_double() == -std::numeric_limits<double>::infinity());
  CHECK(fn.zero_coeff().abs().to_double() == 0.0);
  CHECK(std::abs(fn.norm().to_double() - 1.0) < 1e-14);
  CHECK(expand(fp).coeff(Freq(0)).is_zero());
}

TEST_CASE("astronomical powers stay cheap in factored form") {
  TrigPoly f = one_plus_cos();
  BigInt huge("100000000000000000000000000000000");
  FactoredProduct fp{BigInt(5), {{f, huge}}};
  fp.validate();
  CHECK(fp.factor_count() == huge);

  // Norm and zero coefficient come out in log space. ||f||_1 = 2,
  // f hat(0) = 1, so log norm = count * log 2 and the zero coefficient
  // is exactly 1.
  FactoredNorm fn = factored_norm(fp, 1.0);
  Real want = Real(huge) * log(Real(2L));
  CHECK(abs(fn.log_norm - want).to_double() < 1e-10 * want.to_double());
  CHECK(fn.log_abs_zero.to_double() == 0.0);

  CHECK_THROWS_AS(expand(fp), CapExceeded);
}

TEST_CASE("factored product validation rejects bad shapes") {
  TrigPoly f = one_plus_cos();

  FactoredProduct small_nu{BigInt(2), {{f, BigInt(1)}}};  // nu <= 2 deg
  CHECK_THROWS_AS(small_nu.validate(), Error);

  FactoredProduct bad_count{BigInt(3), {{f, BigInt(0)}}};
  CHECK_THROWS_AS(bad_count.validate(), Error);

  TrigPoly frac;
  frac.set_term(Freq(Rational(1, 2)), Cplx::of(1.0));
  FactoredProduct bad_spec{BigInt(3), {{frac, BigInt(1)}}};
  CHECK_THROWS_AS(bad_spec.validate(), Error);
}
