#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <vector>

#include "frameforge/cplx.hpp"
#include "frameforge/rational.hpp"

namespace frameforge {

// Coefficients smaller than this after arithmetic are dropped; keeps the
// maps sparse without touching certified digits.
Real zero_prune_threshold();

// Finite sum  sum_j a_j e^{2 pi i sigma_j t}  with exact rational
// frequencies and extended-precision coefficients. Immutable by
// convention: operations return new values.
class TrigPoly {
public:
  using TermMap = std::map<Freq, Cplx>;

  TrigPoly() = default;

  static TrigPoly constant(const Real& c);
  static TrigPoly constant(const Cplx& c);

  // Accumulates into the coefficient at f, then prunes if negligible.
  void add_term(const Freq& f, const Cplx& c);
  // Overwrites the coefficient at f (erases when negligible).
  void set_term(const Freq& f, const Cplx& c);

  const TermMap& terms() const { return terms_; }
  Cplx coeff(const Freq& f) const;
  std::size_t support_size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  // max |sigma| over stored terms; 0 for the empty polynomial.
  Freq degree() const;
  bool is_real() const;
  bool is_analytic() const;
  bool has_integer_spectrum() const;

private:
  TermMap terms_;
};

TrigPoly add(const TrigPoly& a, const TrigPoly& b);
TrigPoly sub(const TrigPoly& a, const TrigPoly& b);
TrigPoly scale(const TrigPoly& a, const Cplx& c);
TrigPoly scale(const TrigPoly& a, const Real& c);

// Exact convolution of coefficient maps. Dispatches to an FFT fast path
// when both spectra are integer and the combined support exceeds
// kFftSupportThreshold; the two paths agree to 1e-12 relative.
inline constexpr std::size_t kFftSupportThreshold = 512;
TrigPoly mul(const TrigPoly& a, const TrigPoly& b);
TrigPoly mul_direct(const TrigPoly& a, const TrigPoly& b);
// Requires integer spectra on both operands.
TrigPoly mul_fft(const TrigPoly& a, const TrigPoly& b);

// sigma -> nu * sigma; coefficients unchanged.
TrigPoly dilate(const TrigPoly& p, const BigInt& nu);

// Keeps exactly the terms with |sigma| <= r.
TrigPoly partial_sum(const TrigPoly& p, const Rational& r);

// p in [1, inf]; pass kSupNorm for the sup norm of the coefficients.
inline constexpr double kSupNorm = std::numeric_limits<double>::infinity();
Real coeff_norm(const TrigPoly& poly, double p);

// Pointwise value at t.
Cplx evaluate(const TrigPoly& poly, const Real& t);

// Unexpanded dilation product  prod_j P_j(nu^j t). Consecutive identical
// factors are run-length compressed so a power f^N with astronomical N
// stays O(1) in memory.
struct FactoredProduct {
  struct Run {
    TrigPoly poly;
    BigInt count;
  };
  BigInt nu;
  std::vector<Run> runs;

  BigInt factor_count() const;
  // Checks: nu >= 2, every factor has integer spectrum, counts positive,
  // and nu > 2*deg(P_j) for every factor. Throws Error on breach.
  void validate() const;
};

// Full expansion; throws CapExceeded when the estimated term count
// prod (2 deg_j + 1)^count exceeds the cap.
TrigPoly expand(const FactoredProduct& f, std::size_t cap = 1000000);

// Norm and zero-coefficient of the product without expansion. The
// frequency representation sum k_j nu^j is unique under the validate()
// invariant, so the A^p norm is multiplicative over factors and the
// zero coefficient is the product of the factors' zero coefficients.
struct FactoredNorm {
  Real log_norm;      // log of the A^p norm of the product
  Real log_abs_zero;  // log |zero coefficient|; -inf when it vanishes
  Real zero_arg;      // argument of the zero coefficient
  Real norm() const { return exp(log_norm); }
  Cplx zero_coeff() const;
};
FactoredNorm factored_norm(const FactoredProduct& f, double p);

}  // namespace frameforge
