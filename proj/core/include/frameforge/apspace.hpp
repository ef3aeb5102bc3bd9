#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "frameforge/rational.hpp"
#include "frameforge/trigpoly.hpp"

namespace frameforge {

// Uniform rational grid on the Fourier axis. The step divides 1, so
// every integer shift maps grid nodes to grid nodes.
struct Grid {
  Rational x_min, x_max, step;

  void validate() const;  // throws OutOfRange on an invariant breach
  std::size_t size() const;
  Rational node(std::size_t i) const;
  double node_d(std::size_t i) const;
  // Exact membership test; nullopt when x is off-grid or out of range.
  std::optional<std::size_t> index_of(const Rational& x) const;
  BigInt steps_per_unit() const;

  static Grid standard();  // [-256, 256], step 1/64
};

bool operator==(const Grid& a, const Grid& b);

// A function on the line represented by samples of its Fourier
// transform. decay_exponent d declares |samples(x)| <= C (1+x^2)^{-d/2}
// off the grid, with C estimated from the on-grid samples; err is the
// accumulated demonstration-grade error budget in norm units.
struct SampledSpectrum {
  Grid grid;
  std::vector<std::complex<double>> samples;
  double decay_exponent = 2.0;
  double err = 0.0;

  void validate() const;
  // C above; zero when the declared decay is infinite (compact support).
  double decay_constant() const;
};

struct NormEstimate {
  double value = 0.0;
  double err = 0.0;
};

// L^p quadrature of the transform samples (left-closed Riemann rule,
// exact for dyadic step functions on aligned grids) plus the declared
// off-grid tail folded into err.
NormEstimate norm_ap(const SampledSpectrum& u, double p);

// 10 * sup (1+x^2)|samples(x)|. The declared decay must certify that
// the supremum is attained on the grid; otherwise DecayTooWeak.
double seminorm_triple(const SampledSpectrum& u);

// k-th Haar function on [0,1) (dyadic enumeration: 1 -> indicator,
// 2 -> mother, then 2^j scaled copies) written into the transform
// samples, normalized to unit L^p norm under the grid rule.
SampledSpectrum haar_phi(std::size_t k, const Grid& grid, double p = 2.0);

// samples(x) = sum_n f(n)-coefficient * samples(x - n) for an
// integer-spectrum f; values shifted beyond the grid are dropped and
// accounted in err.
SampledSpectrum mul_periodic(const SampledSpectrum& u, const TrigPoly& f);

// Shift-and-sum for arbitrary rational frequencies; off-grid shifts use
// linear interpolation between neighboring node shifts, with a
// second-difference error estimate added to err.
SampledSpectrum mul_poly(const SampledSpectrum& u, const TrigPoly& P);

// ||u * dilate(f, nu)||_{A^p} for each nu; the caller watches the
// values approach ||u|| * ||f|| as nu grows.
std::vector<double> sep_spec_probe(const SampledSpectrum& u, const TrigPoly& f,
                                   double p, const std::vector<long>& nu_list);

}  // namespace frameforge
