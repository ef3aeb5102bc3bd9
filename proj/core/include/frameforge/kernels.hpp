#pragma once

#include <string>
#include <vector>

#include "frameforge/interval.hpp"
#include "frameforge/rational.hpp"
#include "frameforge/trigpoly.hpp"

namespace frameforge {

// Three periodized bump kernels with closed-form Fourier coefficients.
// Triangle: hat of half-width h, peak 1.  Trapezoid: plateau [-h,h],
// support [-2h,2h].  NonnegPhi: 1 + 6*Triangle(t) - Trapezoid(t+a)
// - Trapezoid(t-a), which vanishes on two bands and has nonnegative
// coefficients.
enum class KernelKind { Triangle, Trapezoid, NonnegPhi };

struct KernelSpec {
  KernelKind kind = KernelKind::Triangle;
  Rational h;
  Rational a;  // NonnegPhi only

  // Admissible ranges: Triangle 0<h<1/2, Trapezoid 0<h<1/4,
  // NonnegPhi 0<h<1/8 with 2h < a < 1/2-2h.  Throws OutOfRange.
  void validate() const;

  // Coefficients are dominated by scale/(h pi^2 n^2): 1, 3, 12.
  Rational tail_scale() const;

  std::string kind_name() const;
};

// n-th Fourier coefficient by closed formula (all three kernels have
// real coefficients).  The argument of sin/cos is reduced mod 1 in
// exact rational arithmetic first, so large n loses no accuracy.
Real kernel_coeff(const KernelSpec& spec, const BigInt& n);
Ivl kernel_coeff_ivl(const KernelSpec& spec, const BigInt& n);

// Exact time-domain value of the periodized piecewise-linear kernel.
Rational kernel_value(const KernelSpec& spec, const Rational& t);

// Bound on sum_{|n|>d} |coeff(n)|: 2*scale/(h pi^2 d).
Ivl tail_a1_bound(const KernelSpec& spec, const BigInt& d);

// Bound on sum_{|n|>d} |coeff(n)|^p: 2*scale^p*(h pi^2)^{-p} *
// d^{1-2p}/(2p-1), by integral comparison.  Requires p > 1/2.
Ivl tail_power_bound(const KernelSpec& spec, const BigInt& d, double p);

struct Truncation {
  TrigPoly poly;  // partial sum keeping |n| <= degree
  BigInt degree;
  Ivl tail_a1;  // certified bound on the discarded coefficient mass
};

Truncation truncate(const KernelSpec& spec, const BigInt& d);

// Certified comparison of the kernel's A^p coefficient norm against
// the closed-form bound scale*h^{(p-1)/p}.  For NonnegPhi the measured
// object is the oscillatory part phi - 1, whose sharpness floor
// h^{(p-1)/p} is checked from below as well.
struct NormReport {
  double p = 1.0;
  BigInt degree;
  Ivl truncated_norm;   // lp norm of the kept coefficients (a lower bound)
  Ivl norm_upper;       // (truncated^p + tail_power)^{1/p}
  Ivl analytic_bound;   // scale * h^{(p-1)/p}
  Ivl sharpness_floor;  // NonnegPhi: h^{(p-1)/p}; zero otherwise
  bool within_bound = false;
  bool sharp = false;
};

// Throws BoundViolated if the certified lower estimate exceeds the
// analytic bound (or, for NonnegPhi, the upper estimate certifiably
// undercuts the sharpness floor).
NormReport norm_bound_check(const KernelSpec& spec, double p,
                            const BigInt& d = BigInt(2048));

// Nonnegativity certificate for NonnegPhi.  The kernel is piecewise
// linear, so nonnegativity at every breakpoint is global; the two
// vanishing bands are certified by exact evaluation at their endpoints
// and midpoints; coefficient signs follow from the factored formula
// with interval enclosures clamped to structural ranges.
struct NonnegReport {
  std::vector<std::pair<Rational, Rational>> breakpoint_values;
  bool breakpoints_nonneg = false;
  bool vanishes_on_bands = false;
  BigInt coeff_check_limit;
  bool coeffs_nonneg = false;
  Ivl min_coeff;             // smallest enclosure seen over the scan, n != 0
  bool zero_coeff_is_one = false;
};

NonnegReport nonneg_check(const KernelSpec& spec,
                          const BigInt& coeff_limit = BigInt(10000));

}  // namespace frameforge
