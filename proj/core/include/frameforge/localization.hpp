#pragma once

#include <string>
#include <vector>

#include "frameforge/interval.hpp"
#include "frameforge/rational.hpp"
#include "frameforge/trigpoly.hpp"

namespace frameforge {

// Parameters of the localization construction: gamma is a Riesz-type
// product of N dilated copies of a kernel partial sum f, P the average
// of N dilated copies of a partner g. The standard pair is built from
// the trapezoid/triangle kernels; the nonneg pair from the nonnegative
// kernel and its notch partner, which keeps every coefficient of gamma
// nonnegative with mean exactly 1.
struct LocalizationParams {
  double p = 2.0;
  double eps = 0.5;
  Real delta;
  Real h;
  BigInt N;
  BigInt deg_f, deg_g;
  BigInt nu;
  bool nonneg = false;
  Rational a = Rational(1, 4);  // nonneg band center
};

struct ChainEntry {
  std::string id;
  Ivl lhs, rhs;
  Real margin;  // rhs.lo - lhs.hi
  bool ok = false;
};

// Inequality-chain certificate. Bounds are certified: every entry
// compares pessimistic interval endpoints, and entries whose raw values
// would overflow (N-th powers) are stated in the log domain, marked by
// a "-log" suffix on the id.
struct LocalizationCertificate {
  LocalizationParams params;
  std::vector<ChainEntry> chain;
  Ivl cond_sup_coeff;     // bound on sup |P coefficient| (equals 1/N)
  Ivl cond_gamma_dist;    // bound on the lp distance of gamma from 1
  Ivl cond_product_dist;  // bound on the lp distance of gamma*P from 1
  Ivl cond_section;       // bound on max_l of the gamma*S_l(P) norms
  bool mean_is_one = false;    // nonneg: product mean exactly 1
  bool coeffs_nonneg = false;  // nonneg: structural coefficient sign
  bool valid = false;
  std::string failure;  // id of the first failing entry
};

// Searches (delta, h, N) so the full chain certifies, then picks
// truncation degrees from closed-form kernel tails and the dilation
// base nu = 2(deg_f+deg_g)+1. Never materializes polynomials.
// Throws OutOfRange for eps outside (0, 2/3), Infeasible when p is not
// certifiably above the golden-ratio threshold or no parameters exist
// within internal caps.
LocalizationParams solve_params(double p, double eps, bool nonneg = false);

// Evaluates the whole inequality chain at the given parameters in
// extended precision. Memory use is independent of N and the degrees.
LocalizationCertificate certify_report(const LocalizationParams& params);

// Same, but throws ChainBroken naming the first failing entry.
LocalizationCertificate certify(const LocalizationParams& params);

struct MaterializedInstance {
  LocalizationParams params;
  TrigPoly f, g;
  FactoredProduct gamma;
  TrigPoly P;
};

// Builds the tiny-instance polynomials explicitly. Requires N <= 4 and
// deg_f, deg_g <= 64; the parameters need not satisfy the full system.
MaterializedInstance materialize(const LocalizationParams& params);

struct SplitCheck {
  BigInt l;
  BigInt s;  // complete dilation levels below the cut
  BigInt m;  // partial-sum order at the first incomplete level
  bool exact = false;            // S_l(P) reassembles from the split
  double measured_norm = 0.0;    // ||gamma * S_l(P)||_p by expansion
  double analytic_bound = 0.0;   // chain formula at measured subquantities
};

struct BruteReport {
  double norm_rel_err = 0.0;      // expanded lp norm vs factored norm
  bool zero_coeff_matches = false;
  bool identity_exact = false;  // N*gamma*(P-1) telescoping, exact dyadics
  std::vector<SplitCheck> splits;
  bool all_splits_exact = false;
  bool bounds_respected = false;
};

// Full-expansion cross-checks of everything the certifier reasons
// about symbolically. Throws MismatchDetected on any failure.
BruteReport brute_check(const MaterializedInstance& inst);

struct ScanCaps {
  Real ln_n_max;  // cap on ln N (the search runs in the log domain)
  Real h_min;
  static ScanCaps defaults();  // ln N <= 1e9, h >= 1e-46
};

struct ScanRow {
  double p = 0.0;
  bool feasible = false;
  bool n_exact = false;  // minimal N materialized as an integer
  BigInt n_min;
  Real ln_n_min;
  Real h_used, delta_used;
};

// Feasibility of the direct parameter system over a logarithmic
// (delta, h) grid with N minimal, per grid point, within caps.
std::vector<ScanRow> scan_threshold(double eps, const std::vector<double>& p_grid,
                                    const ScanCaps& caps = ScanCaps::defaults());

}  // namespace frameforge
