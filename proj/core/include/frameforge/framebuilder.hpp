#pragma once

#include <complex>
#include <map>
#include <vector>

#include "frameforge/apspace.hpp"
#include "frameforge/localization.hpp"
#include "frameforge/rational.hpp"
#include "frameforge/trigpoly.hpp"

namespace frameforge {

// Staged construction of a discrete expansion system on the line.  Each stage
// fits an analytic polynomial to a target, multiplies the running window by a
// dilated periodic factor, and claims a fresh frequency annulus.  The grid
// objects carry their own error budgets; every reported norm is a measured
// grid quantity, so the whole module is demo grade by design.

// Perturbed frequency used for window index n at stage k:
//   sigma(n) = n + r / 2^20,  r = nearest integer to 2^20 / (10 (n+1) k).
// The offset is positive and strictly below 1/(10k).
Freq sigma_default(long n, int k);

struct FitResult {
  TrigPoly Q;              // analytic polynomial over the requested frequencies
  double achieved = 0.0;   // residual grid norm after the fit
  double condition = 0.0;  // diagonal ratio estimate from the pivoted QR
};

// Least-p fit of phi by shifted copies of u_prev at the given frequencies,
// reweighted iteratively from a plain least-squares warm start.  Stops when
// the relative objective decrease falls below 1e-6 or after 500 sweeps.
// Throws SingularSystem (with the condition estimate in the message) when the
// shifted copies are numerically dependent.
FitResult fit_Q(const SampledSpectrum& u_prev, const SampledSpectrum& phi,
                const std::vector<Freq>& freqs, double p, double eta);

// Largest power of two e with e*(1+u_seminorm)*(1+q_norm1+history) < 2^-k*eta.
// Returns 0 when no power of two in [2^-60, 2^60] satisfies the bound.
double choose_eps_k(int k, double eta, double u_seminorm, double q_norm1,
                    double history);

// Minimal integer dilation that exceeds the spectral diameter of Q, clears
// the previously claimed radius r_prev, and shifts any grid-supported content
// fully off the window.  On return *r_next holds the radius claimed by this
// stage: deg(P) * nu + max |spec Q|.
BigInt choose_nu_k(const TrigPoly& Q, const TrigPoly& P, const Rational& r_prev,
                   const Grid& grid, Rational* r_next = nullptr);

struct FrameStage {
  int k = 0;
  double eta = 0.0;
  double eps = 0.0;
  BigInt nu;
  std::vector<long> window;            // indices n fitted at this stage
  TrigPoly Q;                          // frequencies sigma(n), n in window
  std::map<long, std::complex<double>> d;  // coefficient of sigma(n) in Q
  LocalizationParams gamma_params;     // tiny instance behind gamma and P
  TrigPoly gamma;                      // expanded periodic factor
  TrigPoly P;
  double achieved = 0.0;               // fit residual norm
  double gamma_dist = 0.0;             // measured p-norm of gamma - 1
  double contraction = 0.0;            // measured norm of u_k - u_{k-1}
  Rational r_next;                     // outer radius claimed by this stage
};

struct LambdaPoint {
  Freq lambda;       // m * nu_k + sigma(n)
  BigInt n_anchor;   // |m| * nu_k + sign(m) * n
  int k = 0;
  long m = 0;
  long n = 0;
  std::complex<double> scale;  // d_{n,k} * Phat_k(m)
};

struct FramePlan {
  double p = 2.0;
  Grid grid;
  std::map<long, Freq> sigma;          // all perturbed frequencies in use
  SampledSpectrum u0;
  std::vector<SampledSpectrum> u_chain;  // u_chain[k] is the window after stage k
  std::vector<FrameStage> stages;
  Rational r_current;                  // radius cleared so far

  std::vector<LambdaPoint> lambda;     // sorted by increasing |lambda|
  Rational min_gap;                    // smallest pairwise distance in Lambda

  std::vector<std::vector<std::complex<double>>> gmat;  // change of basis
  std::vector<std::vector<std::complex<double>>> ginv;
  double g_dist = 0.0;                 // column-sum norm of G - I
  double k_hat = 0.0;                  // largest coordinate-functional norm
  bool demo_grade = true;

  const SampledSpectrum& w() const { return u_chain.back(); }
};

struct StageInputs {
  int k = 1;
  double eta = 0.0;
  SampledSpectrum phi;         // fit target
  std::vector<long> window;    // indices n to fit
};

// Runs one stage: fit, tolerance selection, tiny certified factor, dilation
// choice, window update.  Appends to plan.stages and plan.u_chain.  Throws
// StageFailed naming the step that broke.
FrameStage& advance_stage(FramePlan& plan, const StageInputs& in);

// Collects lambda = m*nu_k + sigma(n) over every stage, sorted by |lambda|.
// Fills plan.lambda and plan.min_gap.  Throws CollisionDetected when two
// points (or two radii) coincide; BoundViolated when the integer anchors fail
// to increase strictly or drift from |lambda| by 1/(10k) or more.
void enumerate_lambda(FramePlan& plan);

// Grid realization of the k-th system element w * P~_k * Q_k (1-based k).
// The dilated periodic factors are multiplied together exactly before the
// grid projection; projecting them one at a time would lose the content that
// reenters the window only in the product.
SampledSpectrum frame_element(const FramePlan& plan, int k);

// Haar coordinate reading of v against basis element j (1-based), normalized
// so that reading j applied to haar_phi(j) is 1.
std::complex<double> haar_reading(const FramePlan& plan, int j,
                                  const SampledSpectrum& v);

// Builds the change-of-basis matrix G[j][k] = reading_j(element_k), inverts
// it by a truncated Neumann series, and records the column-sum distance to
// the identity plus the largest coordinate-functional norm.  Throws
// NotDiagonallyDominant iff the recorded distance is >= 1.
void compute_functionals(FramePlan& plan);

// Coordinate values psi_k(f) for all stages, via the inverted basis matrix.
std::vector<std::complex<double>> psi_values(const FramePlan& plan,
                                             const SampledSpectrum& f);

// Seed window: one filter-inverted copy of each stage target, planted so the
// stage fit can recover it through the same interpolation the evaluator
// uses.  Amplitudes shrink geometrically so later patterns stay invisible to
// earlier fits.  Throws OutOfRange when the grid cannot seat a pattern.
SampledSpectrum seed_spectrum(const Grid& grid, int stages, double p);

struct FrameBuildOptions {
  int stages = 2;
  double p = 1.8;
  Grid grid{Rational(-24), Rational(12), Rational(1, 64)};
  std::vector<double> eta;  // per-stage targets; default 2^(10+14(k-1))
};

// Full pipeline: seed window, K stages, enumeration, functionals.
FramePlan build_frame(const FrameBuildOptions& opt);

struct ExpandRow {
  long terms = 0;               // J, number of leading lambda points summed
  int k = 0;                    // stage in progress at this cut
  long layer = 0;               // complete symmetric layers of that stage
  double radius = 0.0;          // |lambda_J|
  double error = 0.0;           // measured norm of f - S_J
  double err_budget = 0.0;      // accumulated grid error bound for S_J
  double dist_complete = 0.0;   // norm of f minus the complete-stage sum
  double mid_norm = 0.0;        // norm of the complete-layer part of stage k
  double partial_norm = 0.0;    // norm of the current partial layer
  double partial_bound = 0.0;   // 2 * eta_k * |psi_k(f)| * |w|
  bool partial_ok = false;      // partial_norm <= partial_bound
  bool boundary = false;        // true when a layer completes at this J
};

struct ExpandReport {
  std::vector<ExpandRow> rows;  // one row per J = 1..terms
  double terminal_error = 0.0;
  double terminal_err_budget = 0.0;
  double decomp_residual = 0.0;  // worst gap between S_J and its three parts
};

// Partial sums of the expansion of f along plan.lambda, with the running
// sum split at every J into complete stages, complete layers of the current
// stage, and a partial layer captured by one radius.
ExpandReport expand_frame(const FramePlan& plan, const SampledSpectrum& f,
                          long terms);

}  // namespace frameforge
