#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "frameforge/apspace.hpp"
#include "frameforge/errors.hpp"

using namespace frameforge;

namespace {

SampledSpectrum gaussian_spectrum(const Grid& g) {
  // Transform of 2^{1/4} e^{-pi x^2} style profile: samples e^{-pi x^2}
  // on the grid. Rapid decay, declared exponent 6 keeps the tail budget
  // tiny relative to the 1e-4 tolerances below.
  SampledSpectrum u;
  u.grid = g;
  u.decay_exponent = 6.0;
  u.samples.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.node_d(i);
    u.samples[i] = std::exp(-M_PI * x * x);
  }
  return u;
}

TrigPoly one_plus_cos() {
  TrigPoly f;
  f.set_term(Freq(0), Cplx::of(1.0));
  f.set_term(Freq(1), Cplx::of(0.5));
  f.set_term(Freq(-1), Cplx::of(0.5));
  return f;
}

}  // namespace

TEST_CASE("grid geometry") {
  Grid g = Grid::standard();
  g.validate();
  CHECK(g.step == Rational(1, 64));
  CHECK(g.steps_per_unit() == BigInt(64));
  CHECK(g.size() == 512 * 64 + 1);
  CHECK(g.node(0) == Rational(-256));
  CHECK(g.node(64) == Rational(-255));
  CHECK(g.node_d(0) == -256.0);

  CHECK(g.index_of(Rational(0)) == 256 * 64);
  CHECK(g.index_of(Rational(1, 64)) == 256 * 64 + 1);
  CHECK(!g.index_of(Rational(1, 128)).has_value());  // off-grid
  CHECK(!g.index_of(Rational(300)).has_value());     // out of range

  Grid bad{Rational(0), Rational(1), Rational(2, 7)};  // 1/step not integer
  CHECK_THROWS_AS(bad.validate(), OutOfRange);
  Grid frac{Rational(0), Rational(1, 2), Rational(1, 3)};  // span not integral
  CHECK_THROWS_AS(frac.validate(), OutOfRange);
  Grid rev{Rational(1), Rational(0), Rational(1, 4)};
  CHECK_THROWS_AS(rev.validate(), OutOfRange);
}

TEST_CASE("norms of a sampled gaussian profile") {
  // int e^{-2 pi x^2} dx = 2^{-1/2}, so the L^2 quadrature tends to
  // 2^{-1/4}; the L^1 integral is exactly 1.
  SampledSpectrum u = gaussian_spectrum(Grid::standard());
  u.validate();

  NormEstimate l2 = norm_ap(u, 2.0);
  CHECK(std::abs(l2.value - std::pow(2.0, -0.25)) < 1e-4);
  CHECK(l2.err >= 0.0);
  CHECK(l2.err < 1e-3);

  NormEstimate l1 = norm_ap(u, 1.0);
  CHECK(std::abs(l1.value - 1.0) < 1e-4);

  // sup (1+x^2) e^{-pi x^2} is attained at x = 0 on this grid.
  CHECK(seminorm_triple(u) == 10.0);
}

TEST_CASE("weak declared decay is rejected") {
  SampledSpectrum u = gaussian_spectrum(Grid::standard());
  u.decay_exponent = 1.5;
  CHECK_THROWS_AS(seminorm_triple(u), DecayTooWeak);
}

TEST_CASE("haar family is normalized and orthogonal under the grid rule") {
  Grid g = Grid::standard();
  for (std::size_t k = 1; k <= 6; ++k) {
    SampledSpectrum hk = haar_phi(k, g);
    CHECK(norm_ap(hk, 2.0).value == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Grid inner products vanish across distinct indices.
  double step = 1.0 / 64.0;
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::size_t l = k + 1; l <= 4; ++l) {
      SampledSpectrum a = haar_phi(k, g), b = haar_phi(l, g);
      std::complex<double> dot = 0.0;
      for (std::size_t i = 0; i + 1 < g.size(); ++i)
        dot += a.samples[i] * std::conj(b.samples[i]) * step;
      CHECK(std::abs(dot) < 1e-12);
    }
  }
  // Unit L^p normalization for p away from 2 as well.
  CHECK(norm_ap(haar_phi(3, g, 1.8), 1.8).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("periodic multiply is a shifted sum of samples") {
  Grid g{Rational(-4), Rational(4), Rational(1, 4)};
  SampledSpectrum u;
  u.grid = g;
  u.decay_exponent = std::numeric_limits<double>::infinity();
  u.samples.assign(g.size(), 0.0);
  u.samples[g.index_of(Rational(0)).value()] = 1.0;
  u.samples[g.index_of(Rational(1, 2)).value()] = std::complex<double>(0.0, 2.0);

  SampledSpectrum v = mul_periodic(u, one_plus_cos());
  // Each delta spreads into three copies weighted 1/2, 1, 1/2.
  CHECK(v.samples[g.index_of(Rational(0)).value()] == std::complex<double>(1.0));
  CHECK(v.samples[g.index_of(Rational(1)).value()] == std::complex<double>(0.5));
  CHECK(v.samples[g.index_of(Rational(-1)).value()] == std::complex<double>(0.5));
  CHECK(v.samples[g.index_of(Rational(1, 2)).value()] == std::complex<double>(0.0, 2.0));
  CHECK(v.samples[g.index_of(Rational(3, 2)).value()] == std::complex<double>(0.0, 1.0));
  CHECK(v.samples[g.index_of(Rational(-1, 2)).value()] == std::complex<double>(0.0, 1.0));
  CHECK(v.err == 0.0);  // nothing was clipped; infinite declared decay

  // Under a finite declared decay the edge estimate charges the budget
  // for whatever the shifts push past the boundary.
  SampledSpectrum w = u;
  w.decay_exponent = 6.0;
  w.samples[0] = 4.0;  // at x_min; the left shift falls off the grid
  SampledSpectrum wv = mul_periodic(w, one_plus_cos());
  CHECK(wv.err > 0.0);
  CHECK(wv.decay_exponent == 6.0);
}

TEST_CASE("rational-frequency multiply interpolates between node shifts") {
  Grid g{Rational(-4), Rational(4), Rational(1, 4)};
  SampledSpectrum u;
  u.grid = g;
  u.decay_exponent = std::numeric_limits<double>::infinity();
  u.samples.assign(g.size(), 0.0);
  std::size_t zero = g.index_of(Rational(0)).value();
  u.samples[zero] = 1.0;

  // Shift by 3/8 = 1.5 grid steps: the delta lands half on each of the
  // two neighboring node shifts.
  TrigPoly f;
  f.set_term(Freq(Rational(3, 8)), Cplx::of(1.0));
  SampledSpectrum v = mul_poly(u, f);
  CHECK(std::abs(v.samples[zero + 1] - std::complex<double>(0.5)) < 1e-15);
  CHECK(std::abs(v.samples[zero + 2] - std::complex<double>(0.5)) < 1e-15);
  CHECK(v.err > 0.0);  // interpolation charges the budget

  // On-grid frequencies reduce to the exact shift with no budget.
  TrigPoly shift1;
  shift1.set_term(Freq(Rational(1, 2)), Cplx::of(1.0));
  SampledSpectrum sv = mul_poly(u, shift1);
  CHECK(sv.samples[zero + 2] == std::complex<double>(1.0));
  CHECK(sv.err == 0.0);

  // Integer-spectrum polynomials give the same result through both
  // multiply routes.
  SampledSpectrum gs = gaussian_spectrum(Grid::standard());
  SampledSpectrum a = mul_periodic(gs, one_plus_cos());
  SampledSpectrum b = mul_poly(gs, one_plus_cos());
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(std::abs(a.samples[i] - b.samples[i]) < 1e-15);
}

TEST_CASE("probe values freeze once the spectra separate") {
  // u concentrated on [-1/2, 1/2], f of degree 1: past separation the
  // product norm splits exactly, so the probe returns bit-identical
  // doubles for every sufficiently large dilation.
  Grid g = Grid::standard();
  SampledSpectrum u;
  u.grid = g;
  u.decay_exponent = std::numeric_limits<double>::infinity();
  u.samples.assign(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (rat_abs(g.node(i)) <= Rational(1, 2)) u.samples[i] = 1.0;

  double p = 1.8;
  std::vector<double> vals = sep_spec_probe(u, one_plus_cos(), p, {1, 2, 4, 8, 16});
  CHECK(vals.size() == 5);
  // nu = 1 overlaps the translates; all later values agree exactly.
  CHECK(vals[1] == vals[2]);
  CHECK(vals[2] == vals[3]);
  CHECK(vals[3] == vals[4]);
  CHECK(vals[0] != vals[1]);

  double u_norm = norm_ap(u, p).value;
  double f_norm = std::pow(1.0 + 2.0 * std::pow(0.5, p), 1.0 / p);
  CHECK(std::abs(vals[4] - u_norm * f_norm) < 1e-12);
}

TEST_CASE("spectrum validation") {
  SampledSpectrum u;
  u.grid = Grid{Rational(-1), Rational(1), Rational(1, 4)};
  u.samples.assign(3, 0.0);  // wrong length
  CHECK_THROWS_AS(u.validate(), OutOfRange);
  u.samples.assign(u.grid.size(), 0.0);
  CHECK_NOTHROW(u.validate());
  u.decay_exponent = -1.0;
  CHECK_THROWS_AS(u.validate(), OutOfRange);
}
