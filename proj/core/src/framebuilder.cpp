#include "frameforge/framebuilder.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "frameforge/errors.hpp"

namespace frameforge {

namespace {

double step_d(const Grid& g) { return g.step.convert_to<double>(); }

// Left-closed quadrature, matching norm_ap: the last node carries no weight.
double grid_norm(const std::vector<std::complex<double>>& s, double step,
                 double p) {
  double q = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    q += std::pow(std::abs(s[i]), p);
  return std::pow(q * step, 1.0 / p);
}

SampledSpectrum zeros_like(const Grid& g) {
  SampledSpectrum u;
  u.grid = g;
  u.samples.assign(g.size(), {0.0, 0.0});
  u.decay_exponent = std::numeric_limits<double>::infinity();
  u.err = 0.0;
  return u;
}

void axpy(SampledSpectrum& acc, const std::complex<double>& a,
          const SampledSpectrum& v) {
  for (std::size_t i = 0; i < acc.samples.size(); ++i)
    acc.samples[i] += a * v.samples[i];
  acc.err += std::abs(a) * v.err;
  acc.decay_exponent = std::min(acc.decay_exponent, v.decay_exponent);
}

SampledSpectrum sub_spec(const SampledSpectrum& a, const SampledSpectrum& b) {
  SampledSpectrum d = a;
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    d.samples[i] -= b.samples[i];
  d.err = a.err + b.err;
  d.decay_exponent = std::min(a.decay_exponent, b.decay_exponent);
  return d;
}

TrigPoly shift_freqs(const TrigPoly& f, long m) {
  TrigPoly out;
  for (const auto& [fr, c] : f.terms()) out.set_term(fr + Rational(m), c);
  return out;
}

std::complex<double> to_cd(const Cplx& c) {
  return {c.re.to_double(), c.im.to_double()};
}

long freq_long(const Freq& f) {
  if (!is_integer(f)) throw MismatchDetected("expected an integer frequency");
  return rat_num(f).convert_to<long>();
}

// Tiny certified factor shared by every stage: one dilation level keeps the
// materialized polynomials small while the measured distance from 1 stays
// well under any plausible stage tolerance.
LocalizationParams tiny_factor_params(double p, double eps) {
  LocalizationParams lp;
  lp.p = p;
  lp.eps = eps;
  lp.delta = Real(0.0);
  lp.h = Real::from_rational(Rational(1, 256));
  lp.N = 1;
  lp.deg_f = 64;
  lp.deg_g = 64;
  lp.nu = 257;
  lp.nonneg = false;
  return lp;
}

}  // namespace

Freq sigma_default(long n, int k) {
  if (n < 1 || k < 1) throw OutOfRange("perturbed frequency needs n, k >= 1");
  Rational q = Rational(BigInt(1) << 20, BigInt(10) * (n + 1) * k);
  BigInt r = rat_floor(q + Rational(1, 2));
  return Rational(n) + Rational(r, BigInt(1) << 20);
}

FitResult fit_Q(const SampledSpectrum& u_prev, const SampledSpectrum& phi,
                const std::vector<Freq>& freqs, double p, double eta) {
  u_prev.validate();
  phi.validate();
  if (!(u_prev.grid == phi.grid))
    throw OutOfRange("fit operands live on different grids");
  if (freqs.empty()) throw OutOfRange("fit needs at least one frequency");
  if (!(p > 1.0)) throw OutOfRange("fit requires p > 1");
  (void)eta;  // the stage driver enforces the target; the fit only reports

  {
    std::vector<Freq> sorted = freqs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw OutOfRange("fit frequencies must be distinct");
  }

  const std::size_t n = phi.samples.size();
  const std::size_t cols = freqs.size();
  const double step = step_d(phi.grid);

  // Columns go through the same interpolating shift the evaluator applies,
  // so anything the evaluator can produce is exactly representable.
  Eigen::MatrixXcd A(n, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    TrigPoly e;
    e.set_term(freqs[j], Cplx(Real(1.0)));
    SampledSpectrum col = mul_poly(u_prev, e);
    for (std::size_t i = 0; i < n; ++i) A(i, j) = col.samples[i];
  }
  Eigen::VectorXcd y(n);
  for (std::size_t i = 0; i < n; ++i) y(i) = phi.samples[i];

  Eigen::VectorXd base_w = Eigen::VectorXd::Ones(static_cast<long>(n));
  base_w(static_cast<long>(n) - 1) = 0.0;

  double condition = 0.0;
  auto weighted_solve = [&](const Eigen::VectorXd& wv, bool record) {
    Eigen::MatrixXcd Aw = A;
    Eigen::VectorXcd yw = y;
    for (std::size_t i = 0; i < n; ++i) {
      double s = std::sqrt(wv(static_cast<long>(i)));
      Aw.row(static_cast<long>(i)) *= s;
      yw(static_cast<long>(i)) *= s;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(Aw);
    Eigen::VectorXd rd = qr.matrixQR()
                             .topLeftCorner(static_cast<long>(cols),
                                            static_cast<long>(cols))
                             .diagonal()
                             .cwiseAbs();
    double dmax = rd.maxCoeff();
    double dmin = rd.minCoeff();
    double cond = dmin > 0.0 ? dmax / dmin
                             : std::numeric_limits<double>::infinity();
    if (record) condition = cond;
    if (dmax == 0.0 || dmin <= dmax * 1e-14) {
      std::ostringstream os;
      os << "shifted copies are numerically dependent (condition estimate "
         << cond << ")";
      throw SingularSystem(os.str());
    }
    return Eigen::VectorXcd(qr.solve(yw));
  };

  auto objective = [&](const Eigen::VectorXcd& d) {
    Eigen::VectorXcd r = y - A * d;
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      q += std::pow(std::abs(r(static_cast<long>(i))), p);
    return q * step;
  };

  // Plain least-squares warm start, then reweighted sweeps.
  Eigen::VectorXcd d = weighted_solve(base_w, true);
  double obj = objective(d);
  for (int sweep = 0; sweep < 500; ++sweep) {
    Eigen::VectorXcd r = y - A * d;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      scale = std::max(scale, std::abs(r(static_cast<long>(i))));
    double mu = std::max(scale * 1e-8, 1e-150);
    mu *= mu;
    Eigen::VectorXd wv(static_cast<long>(n));
    for (std::size_t i = 0; i < n; ++i)
      wv(static_cast<long>(i)) =
          base_w(static_cast<long>(i)) *
          std::pow(std::norm(r(static_cast<long>(i))) + mu, (p - 2.0) / 2.0);
    Eigen::VectorXcd d_new = weighted_solve(wv, false);
    double obj_new = objective(d_new);
    double drop = obj - std::min(obj, obj_new);
    if (obj_new <= obj) d = d_new;
    obj = std::min(obj, obj_new);
    if (drop <= 1e-6 * std::max(obj, 1e-300)) break;
  }

  FitResult out;
  out.condition = condition;
  out.achieved = std::pow(obj, 1.0 / p);
  for (std::size_t j = 0; j < cols; ++j) {
    std::complex<double> c = d(static_cast<long>(j));
    if (c != 0.0) out.Q.set_term(freqs[j], Cplx::of(c.real(), c.imag()));
  }
  return out;
}

double choose_eps_k(int k, double eta, double u_seminorm, double q_norm1,
                    double history) {
  if (k < 1) throw OutOfRange("stage index starts at 1");
  if (!(eta > 0.0) || !(u_seminorm >= 0.0) || !(q_norm1 >= 0.0) ||
      !(history >= 0.0))
    throw OutOfRange("tolerance selection needs positive eta and nonnegative norms");
  const double lhs_factor = (1.0 + u_seminorm) * (1.0 + q_norm1 + history);
  const double rhs = std::ldexp(eta, -k);
  for (int t = 60; t >= -60; --t) {
    double e = std::ldexp(1.0, t);
    if (e * lhs_factor < rhs) return e;
  }
  return 0.0;
}

BigInt choose_nu_k(const TrigPoly& Q, const TrigPoly& P, const Rational& r_prev,
                   const Grid& grid, Rational* r_next) {
  grid.validate();
  if (Q.empty()) throw OutOfRange("dilation choice needs a nonempty spectrum");
  if (r_prev < 0) throw OutOfRange("claimed radius cannot be negative");
  Rational qmin = Q.terms().begin()->first;
  Rational qmax = Q.terms().rbegin()->first;
  Rational maxabs = std::max(rat_abs(qmin), rat_abs(qmax));
  Rational span = grid.x_max - grid.x_min;

  BigInt nu(1);
  auto raise = [&](const Rational& bound) {
    BigInt c = rat_floor(bound) + 1;
    if (c > nu) nu = c;
  };
  raise(qmax - qmin);       // in-stage blocks stay ordered
  raise(r_prev + maxabs);   // new blocks clear everything claimed so far
  raise(span);              // dilated shifts move grid content off the window

  if (r_next) {
    Rational degp = P.empty() ? Rational(0) : rat_abs(P.degree());
    *r_next = degp * Rational(nu) + maxabs;
  }
  return nu;
}

SampledSpectrum seed_spectrum(const Grid& grid, int stages, double p) {
  grid.validate();
  if (stages < 1) throw OutOfRange("need at least one stage");
  if (!(p >= 1.0)) throw OutOfRange("seed normalization requires p >= 1");

  const long n = static_cast<long>(grid.size());
  SampledSpectrum u = zeros_like(grid);

  for (int k = 1; k <= stages; ++k) {
    long center = 2 + 14L * (k - 1) + 4;
    Freq s = sigma_default(center, k);
    SampledSpectrum target = haar_phi(static_cast<std::size_t>(k), grid, p);

    Rational qq = s / grid.step;
    BigInt whole = rat_floor(qq);
    double theta = (qq - Rational(whole)).convert_to<double>();
    long q = whole.convert_to<long>();

    // Invert the two-tap interpolation filter: the pattern v satisfies
    // (1-theta) v[j] + theta v[j-1] = target[j+q], so the evaluator's shift
    // by sigma(center) reproduces the target exactly.  Recurse in whichever
    // direction contracts.
    auto tgt = [&](long j) -> double {
      long t = j + q;
      return (t >= 0 && t < n) ? target.samples[static_cast<std::size_t>(t)].real()
                               : 0.0;
    };
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    if (theta < 0.5) {
      for (long j = 0; j < n; ++j) {
        double prev = j > 0 ? v[static_cast<std::size_t>(j - 1)] : 0.0;
        v[static_cast<std::size_t>(j)] = (tgt(j) - theta * prev) / (1.0 - theta);
      }
    } else {
      for (long j = n - 1; j >= 1; --j) {
        double cur = v[static_cast<std::size_t>(j)];
        v[static_cast<std::size_t>(j - 1)] = (tgt(j) - (1.0 - theta) * cur) / theta;
      }
    }
    double vmax = 0.0;
    for (long j = 0; j < n; ++j) {
      if (!std::isfinite(v[static_cast<std::size_t>(j)]))
        throw OutOfRange("seed pattern inversion diverged");
      vmax = std::max(vmax, std::abs(v[static_cast<std::size_t>(j)]));
    }
    if (std::abs(v.front()) > 1e-100 || std::abs(v.back()) > 1e-100 ||
        vmax <= 1e-100) {
      std::ostringstream os;
      os << "grid window cannot seat the stage-" << k << " pattern";
      throw OutOfRange(os.str());
    }

    double amp = std::ldexp(1.0, -4 - 13 * (k - 1));
    for (long j = 0; j < n; ++j)
      u.samples[static_cast<std::size_t>(j)] += amp * v[static_cast<std::size_t>(j)];
  }
  return u;
}

FrameStage& advance_stage(FramePlan& plan, const StageInputs& in) {
  if (plan.u_chain.empty()) {
    plan.u0.validate();
    plan.u_chain.push_back(plan.u0);
  }
  if (in.k != static_cast<int>(plan.stages.size()) + 1)
    throw OutOfRange("stages must advance in order");
  if (!(in.eta > 0.0)) throw OutOfRange("stage target must be positive");
  if (in.window.empty()) throw OutOfRange("stage window is empty");

  const SampledSpectrum& u_prev = plan.u_chain.back();

  std::vector<Freq> freqs;
  freqs.reserve(in.window.size());
  for (long nn : in.window) {
    if (plan.sigma.count(nn))
      throw OutOfRange("window index reused across stages");
    freqs.push_back(sigma_default(nn, in.k));
  }

  FitResult fr = fit_Q(u_prev, in.phi, freqs, plan.p, in.eta);
  if (!(fr.achieved < in.eta)) {
    std::ostringstream os;
    os << "stage " << in.k << " fit: residual " << fr.achieved
       << " is not below the target " << in.eta;
    throw StageFailed(os.str());
  }

  double semi = seminorm_triple(u_prev);
  double qn1 = coeff_norm(fr.Q, 1.0).to_double();
  double hist = 0.0;
  for (const FrameStage& st : plan.stages)
    hist += coeff_norm(st.P, 1.0).to_double() * coeff_norm(st.Q, 1.0).to_double();
  double eps = choose_eps_k(in.k, in.eta, semi, qn1, hist);
  if (eps == 0.0) {
    std::ostringstream os;
    os << "stage " << in.k
       << " tolerance: no power of two fits under the stage budget";
    throw StageFailed(os.str());
  }

  LocalizationParams lp = tiny_factor_params(plan.p, eps);
  MaterializedInstance inst = materialize(lp);
  TrigPoly gamma_x = expand(inst.gamma);
  double dist =
      coeff_norm(sub(gamma_x, TrigPoly::constant(Real(1.0))), plan.p).to_double();
  if (!(dist < eps)) {
    std::ostringstream os;
    os << "stage " << in.k << " periodic factor: distance " << dist
       << " from 1 is not below the tolerance " << eps;
    throw StageFailed(os.str());
  }

  Rational r_next;
  BigInt nu = choose_nu_k(fr.Q, inst.P, plan.r_current, plan.grid, &r_next);

  SampledSpectrum u_next = mul_periodic(u_prev, dilate(gamma_x, nu));
  SampledSpectrum diff = sub_spec(u_next, u_prev);
  double contraction = norm_ap(diff, plan.p).value;
  if (!(contraction < std::ldexp(1.0, -in.k))) {
    std::ostringstream os;
    os << "stage " << in.k << " window update: moved " << contraction
       << ", needs to stay below " << std::ldexp(1.0, -in.k);
    throw StageFailed(os.str());
  }

  FrameStage st;
  st.k = in.k;
  st.eta = in.eta;
  st.eps = eps;
  st.nu = nu;
  st.window = in.window;
  st.Q = fr.Q;
  for (std::size_t i = 0; i < in.window.size(); ++i)
    st.d[in.window[i]] = to_cd(fr.Q.coeff(freqs[i]));
  st.gamma_params = lp;
  st.gamma = gamma_x;
  st.P = inst.P;
  st.achieved = fr.achieved;
  st.gamma_dist = dist;
  st.contraction = contraction;
  st.r_next = r_next;

  for (std::size_t i = 0; i < in.window.size(); ++i)
    plan.sigma[in.window[i]] = freqs[i];
  plan.r_current = r_next;
  plan.stages.push_back(std::move(st));
  plan.u_chain.push_back(std::move(u_next));
  return plan.stages.back();
}

void enumerate_lambda(FramePlan& plan) {
  if (plan.stages.empty()) throw OutOfRange("no stages to enumerate");
  plan.lambda.clear();

  for (const FrameStage& st : plan.stages) {
    for (const auto& [mf, c] : st.P.terms()) {
      long m = freq_long(mf);
      if (m == 0)
        throw BoundViolated("periodic comb carries a zero frequency");
      for (long nn : st.window) {
        LambdaPoint pt;
        pt.k = st.k;
        pt.m = m;
        pt.n = nn;
        Freq s = plan.sigma.at(nn);
        pt.lambda = Rational(m) * Rational(st.nu) + s;
        pt.n_anchor = BigInt(m > 0 ? m : -m) * st.nu +
                      (m > 0 ? BigInt(nn) : -BigInt(nn));
        pt.scale = st.d.at(nn) * to_cd(c);
        plan.lambda.push_back(std::move(pt));
      }
    }
  }

  std::sort(plan.lambda.begin(), plan.lambda.end(),
            [](const LambdaPoint& a, const LambdaPoint& b) {
              return rat_abs(a.lambda) < rat_abs(b.lambda);
            });
  for (std::size_t i = 1; i < plan.lambda.size(); ++i)
    if (rat_abs(plan.lambda[i - 1].lambda) == rat_abs(plan.lambda[i].lambda))
      throw CollisionDetected("two enumeration points share a radius");

  // Uniform discreteness: smallest pairwise distance, exactly.
  std::vector<Rational> vals;
  vals.reserve(plan.lambda.size());
  for (const LambdaPoint& pt : plan.lambda) vals.push_back(pt.lambda);
  std::sort(vals.begin(), vals.end());
  Rational gap(0);
  bool first = true;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    Rational d = vals[i] - vals[i - 1];
    if (d == 0) throw CollisionDetected("duplicate frequency in the enumeration");
    if (first || d < gap) gap = d;
    first = false;
  }
  plan.min_gap = plan.lambda.size() > 1 ? gap : Rational(1);

  BigInt prev_anchor(0);
  for (const LambdaPoint& pt : plan.lambda) {
    if (pt.n_anchor <= 0)
      throw BoundViolated("integer anchor is not positive");
    if (pt.n_anchor <= prev_anchor)
      throw BoundViolated("integer anchors fail to increase with the radius");
    prev_anchor = pt.n_anchor;
    Rational drift = rat_abs(rat_abs(pt.lambda) - Rational(pt.n_anchor));
    if (!(drift < Rational(1, 10 * pt.k)))
      throw BoundViolated("radius drifts too far from its integer anchor");
  }
}

SampledSpectrum frame_element(const FramePlan& plan, int k) {
  if (k < 1 || k > static_cast<int>(plan.stages.size()))
    throw OutOfRange("stage index out of range");
  const FrameStage& st = plan.stages[static_cast<std::size_t>(k - 1)];

  SampledSpectrum src = plan.u0;
  for (const FrameStage& other : plan.stages)
    if (other.k != st.k)
      src = mul_periodic(src, dilate(other.gamma, other.nu));

  SampledSpectrum acc = zeros_like(plan.grid);
  for (const auto& [mf, c] : st.P.terms()) {
    long m = freq_long(mf);
    SampledSpectrum base =
        mul_periodic(src, dilate(shift_freqs(st.gamma, m), st.nu));
    SampledSpectrum term = mul_poly(base, st.Q);
    axpy(acc, to_cd(c), term);
  }
  return acc;
}

std::complex<double> haar_reading(const FramePlan& plan, int j,
                                  const SampledSpectrum& v) {
  if (j < 1) throw OutOfRange("basis index starts at 1");
  if (!(v.grid == plan.grid)) throw OutOfRange("reading needs the plan grid");
  SampledSpectrum pat = haar_phi(static_cast<std::size_t>(j), plan.grid, plan.p);
  double step = step_d(plan.grid);
  std::complex<double> dot(0.0, 0.0);
  double s2 = 0.0;
  for (std::size_t i = 0; i + 1 < pat.samples.size(); ++i) {
    dot += std::conj(pat.samples[i]) * v.samples[i];
    s2 += std::norm(pat.samples[i]);
  }
  return dot / s2;  // the step factors cancel
}

void compute_functionals(FramePlan& plan) {
  const int K = static_cast<int>(plan.stages.size());
  if (K == 0) throw OutOfRange("no stages to invert");

  std::vector<SampledSpectrum> elems;
  elems.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) elems.push_back(frame_element(plan, k));

  auto& G = plan.gmat;
  G.assign(static_cast<std::size_t>(K),
           std::vector<std::complex<double>>(static_cast<std::size_t>(K)));
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k)
      G[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
          haar_reading(plan, j + 1, elems[static_cast<std::size_t>(k)]);

  double dist = 0.0;
  for (int k = 0; k < K; ++k) {
    double col = 0.0;
    for (int j = 0; j < K; ++j) {
      std::complex<double> e = G[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      if (j == k) e -= 1.0;
      col += std::abs(e);
    }
    dist = std::max(dist, col);
  }
  plan.g_dist = dist;
  if (dist >= 1.0) {
    std::ostringstream os;
    os << "change of basis sits " << dist
       << " from the identity; the series inversion cannot converge";
    throw NotDiagonallyDominant(os.str());
  }

  // Truncated Neumann series: X <- I + (I - G) X.
  auto ident = [&](void) {
    std::vector<std::vector<std::complex<double>>> m(
        static_cast<std::size_t>(K),
        std::vector<std::complex<double>>(static_cast<std::size_t>(K), 0.0));
    for (int j = 0; j < K; ++j)
      m[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = 1.0;
    return m;
  };
  auto X = ident();
  for (int sweep = 0; sweep < 400; ++sweep) {
    auto Xn = ident();
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k) {
        std::complex<double> acc = 0.0;
        for (int t = 0; t < K; ++t) {
          std::complex<double> e =
              (j == t ? std::complex<double>(1.0, 0.0) : 0.0) -
              G[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
          acc += e * X[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
        }
        Xn[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] += acc;
      }
    double delta = 0.0;
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        delta = std::max(delta,
                         std::abs(Xn[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                                  X[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]));
    X = Xn;
    if (delta < 1e-17) break;
  }
  plan.ginv = X;

  // Largest coordinate-functional norm, via the representing grid functions.
  double q = plan.p / (plan.p - 1.0);
  double step = step_d(plan.grid);
  std::vector<std::vector<std::complex<double>>> reps(
      static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    SampledSpectrum pat = haar_phi(static_cast<std::size_t>(j + 1), plan.grid, plan.p);
    double s2 = 0.0;
    for (std::size_t i = 0; i + 1 < pat.samples.size(); ++i)
      s2 += std::norm(pat.samples[i]);
    double dual_scale = 1.0 / (s2 * step);
    reps[static_cast<std::size_t>(j)].assign(pat.samples.size(), 0.0);
    for (std::size_t i = 0; i < pat.samples.size(); ++i)
      reps[static_cast<std::size_t>(j)][i] = pat.samples[i] * dual_scale;
  }
  double k_hat = 0.0;
  for (int k = 0; k < K; ++k) {
    std::vector<std::complex<double>> rk(plan.grid.size(), 0.0);
    for (int j = 0; j < K; ++j)
      for (std::size_t i = 0; i < rk.size(); ++i)
        rk[i] += plan.ginv[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
                 reps[static_cast<std::size_t>(j)][i];
    k_hat = std::max(k_hat, grid_norm(rk, step, q));
  }
  plan.k_hat = k_hat;
}

std::vector<std::complex<double>> psi_values(const FramePlan& plan,
                                             const SampledSpectrum& f) {
  if (plan.ginv.empty()) throw OutOfRange("plan functionals are missing");
  const int K = static_cast<int>(plan.stages.size());
  std::vector<std::complex<double>> readings(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j)
    readings[static_cast<std::size_t>(j)] = haar_reading(plan, j + 1, f);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j)
      out[static_cast<std::size_t>(k)] +=
          plan.ginv[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
          readings[static_cast<std::size_t>(j)];
  return out;
}

FramePlan build_frame(const FrameBuildOptions& opt) {
  if (opt.stages < 1) throw OutOfRange("need at least one stage");
  if (!(opt.p > 1.0)) throw OutOfRange("the exponent must exceed 1");
  FramePlan plan;
  plan.p = opt.p;
  plan.grid = opt.grid;
  plan.grid.validate();
  plan.u0 = seed_spectrum(plan.grid, opt.stages, plan.p);
  plan.u_chain.push_back(plan.u0);
  plan.r_current = Rational(0);

  for (int k = 1; k <= opt.stages; ++k) {
    StageInputs in;
    in.k = k;
    in.eta = (static_cast<std::size_t>(k) <= opt.eta.size())
               ? opt.eta[static_cast<std::size_t>(k - 1)]
               : std::ldexp(1.0, 10 + 14 * (k - 1));
    in.phi = haar_phi(static_cast<std::size_t>(k), plan.grid, plan.p);
    long lo = 2 + 14L * (k - 1);
    for (long nn = lo + 1; nn <= lo + 8; ++nn) in.window.push_back(nn);
    advance_stage(plan, in);
  }

  enumerate_lambda(plan);
  compute_functionals(plan);
  return plan;
}

ExpandReport expand_frame(const FramePlan& plan, const SampledSpectrum& f,
                          long terms) {
  f.validate();
  if (!(f.grid == plan.grid)) throw OutOfRange("input lives on a different grid");
  if (plan.lambda.empty()) throw OutOfRange("plan has no enumeration");
  if (plan.ginv.empty()) throw OutOfRange("plan functionals are missing");
  if (terms < 1 || terms > static_cast<long>(plan.lambda.size()))
    throw OutOfRange("term count must lie in [1, |Lambda|]");

  const double p = plan.p;
  auto psi = psi_values(plan, f);
  double wnorm = norm_ap(plan.w(), p).value;

  // Layer tables: distinct |m| per stage in increasing order, with the m
  // values and the point count of each layer.
  struct LayerTable {
    std::vector<long> absm;
    std::vector<std::vector<long>> ms;
    std::vector<std::size_t> count;
  };
  const int K = static_cast<int>(plan.stages.size());
  std::vector<LayerTable> table(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const FrameStage& st = plan.stages[static_cast<std::size_t>(k)];
    std::map<long, std::vector<long>> groups;
    for (const auto& [mf, c] : st.P.terms()) {
      long m = freq_long(mf);
      groups[m > 0 ? m : -m].push_back(m);
    }
    for (auto& [a, ms] : groups) {
      table[static_cast<std::size_t>(k)].absm.push_back(a);
      table[static_cast<std::size_t>(k)].count.push_back(ms.size() *
                                                         st.window.size());
      table[static_cast<std::size_t>(k)].ms.push_back(ms);
    }
  }

  // Lazy per-stage scratch: the window chain without the stage, and the
  // grid base for each comb frequency m (periodic factor and comb shift
  // multiplied exactly before projection).
  std::vector<SampledSpectrum> srcs(static_cast<std::size_t>(K));
  std::vector<bool> src_ready(static_cast<std::size_t>(K), false);
  std::vector<std::map<long, SampledSpectrum>> bases(static_cast<std::size_t>(K));
  auto base_for = [&](int k1, long m) -> const SampledSpectrum& {
    std::size_t ki = static_cast<std::size_t>(k1 - 1);
    auto it = bases[ki].find(m);
    if (it != bases[ki].end()) return it->second;
    if (!src_ready[ki]) {
      SampledSpectrum src = plan.u0;
      for (const FrameStage& other : plan.stages)
        if (other.k != k1)
          src = mul_periodic(src, dilate(other.gamma, other.nu));
      srcs[ki] = std::move(src);
      src_ready[ki] = true;
    }
    const FrameStage& st = plan.stages[ki];
    SampledSpectrum b =
        mul_periodic(srcs[ki], dilate(shift_freqs(st.gamma, m), st.nu));
    return bases[ki].emplace(m, std::move(b)).first->second;
  };

  ExpandReport rep;
  rep.rows.reserve(static_cast<std::size_t>(terms));

  SampledSpectrum S = zeros_like(plan.grid);
  SampledSpectrum sprime = zeros_like(plan.grid);
  double dist_complete = norm_ap(sub_spec(f, sprime), p).value;

  int cur = plan.lambda.front().k;
  SampledSpectrum s2_acc = zeros_like(plan.grid);
  double mid_cached = 0.0;
  std::size_t layer_idx = 0;   // complete layers of the current stage
  std::size_t in_layer = 0;    // points emitted from the next layer

  for (long j = 1; j <= terms; ++j) {
    const LambdaPoint& pt = plan.lambda[static_cast<std::size_t>(j - 1)];
    if (pt.k != cur) {
      if (pt.k != cur + 1)
        throw MismatchDetected("enumeration interleaves stages");
      axpy(sprime, psi[static_cast<std::size_t>(cur - 1)],
           frame_element(plan, cur));
      dist_complete = norm_ap(sub_spec(f, sprime), p).value;
      cur = pt.k;
      s2_acc = zeros_like(plan.grid);
      mid_cached = 0.0;
      layer_idx = 0;
      in_layer = 0;
    }
    const FrameStage& st = plan.stages[static_cast<std::size_t>(cur - 1)];
    const LayerTable& tab = table[static_cast<std::size_t>(cur - 1)];
    std::complex<double> psik = psi[static_cast<std::size_t>(cur - 1)];

    if (layer_idx >= tab.absm.size() ||
        (pt.m > 0 ? pt.m : -pt.m) != tab.absm[layer_idx])
      throw MismatchDetected("enumeration leaves its layer early");

    // Running sum gains one point.
    {
      TrigPoly e;
      e.set_term(plan.sigma.at(pt.n), Cplx(Real(1.0)));
      SampledSpectrum term = mul_poly(base_for(cur, pt.m), e);
      axpy(S, psik * pt.scale, term);
    }
    ++in_layer;
    bool boundary = in_layer == tab.count[layer_idx];

    long layer = layer_idx == 0 ? 0 : tab.absm[layer_idx - 1];
    SampledSpectrum s3_raw = zeros_like(plan.grid);
    if (boundary) {
      layer = tab.absm[layer_idx];
      for (long m : tab.ms[layer_idx]) {
        SampledSpectrum full = mul_poly(base_for(cur, m), st.Q);
        axpy(s2_acc, to_cd(st.P.coeff(Rational(m))), full);
      }
      mid_cached = std::abs(psik) * norm_ap(s2_acc, p).value;
      ++layer_idx;
      in_layer = 0;
    } else {
      Rational r = rat_abs(pt.lambda);
      for (long m : tab.ms[layer_idx]) {
        TrigPoly sel;
        for (const auto& [fr, c] : st.Q.terms())
          if (rat_abs(Rational(m) * Rational(st.nu) + fr) <= r)
            sel.set_term(fr, c);
        if (sel.empty()) continue;
        SampledSpectrum part = mul_poly(base_for(cur, m), sel);
        axpy(s3_raw, to_cd(st.P.coeff(Rational(m))), part);
      }
    }
    double partial_norm = std::abs(psik) * norm_ap(s3_raw, p).value;
    double partial_bound = 2.0 * st.eta * std::abs(psik) * wnorm;

    NormEstimate dn = norm_ap(sub_spec(f, S), p);

    // The three parts must reassemble the running sum.
    {
      SampledSpectrum tmp = sprime;
      axpy(tmp, psik, s2_acc);
      axpy(tmp, psik, s3_raw);
      double resid = 0.0;
      for (std::size_t i = 0; i < tmp.samples.size(); ++i)
        resid = std::max(resid, std::abs(S.samples[i] - tmp.samples[i]));
      rep.decomp_residual = std::max(rep.decomp_residual, resid);
    }

    ExpandRow row;
    row.terms = j;
    row.k = cur;
    row.layer = layer;
    row.radius = rat_abs(pt.lambda).convert_to<double>();
    row.error = dn.value;
    row.err_budget = dn.err;
    row.dist_complete = dist_complete;
    row.mid_norm = mid_cached;
    row.partial_norm = partial_norm;
    row.partial_bound = partial_bound;
    row.partial_ok = partial_norm <= partial_bound * (1.0 + 1e-12);
    row.boundary = boundary;
    rep.rows.push_back(row);
  }

  rep.terminal_error = rep.rows.back().error;
  rep.terminal_err_budget = rep.rows.back().err_budget;
  return rep;
}

}  // namespace frameforge
