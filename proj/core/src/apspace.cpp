#include "frameforge/apspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frameforge/errors.hpp"

namespace frameforge {

void Grid::validate() const {
  if (!(step > 0)) throw OutOfRange("grid step must be positive");
  Rational span = (x_max - x_min) / step;
  if (!is_integer(span) || span <= 0)
    throw OutOfRange("grid span must be a positive whole number of steps");
  if (!is_integer(1 / step)) throw OutOfRange("grid step must divide 1");
}

std::size_t Grid::size() const {
  Rational span = (x_max - x_min) / step;
  return rat_num(span).convert_to<std::size_t>() + 1;
}

Rational Grid::node(std::size_t i) const { return x_min + Rational(i) * step; }

double Grid::node_d(std::size_t i) const {
  return node(i).convert_to<double>();
}

std::optional<std::size_t> Grid::index_of(const Rational& x) const {
  Rational q = (x - x_min) / step;
  if (!is_integer(q) || q < 0) return std::nullopt;
  std::size_t i = rat_num(q).convert_to<std::size_t>();
  if (i >= size()) return std::nullopt;
  return i;
}

BigInt Grid::steps_per_unit() const { return rat_num(1 / step); }

Grid Grid::standard() { return Grid{Rational(-256), Rational(256), Rational(1, 64)}; }

bool operator==(const Grid& a, const Grid& b) {
  return a.x_min == b.x_min && a.x_max == b.x_max && a.step == b.step;
}

void SampledSpectrum::validate() const {
  grid.validate();
  if (samples.size() != grid.size())
    throw OutOfRange("sample count does not match the grid");
  if (!(decay_exponent >= 0)) throw OutOfRange("decay exponent must be >= 0");
}

double SampledSpectrum::decay_constant() const {
  if (std::isinf(decay_exponent)) return 0.0;
  double c = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double x = grid.node_d(i);
    c = std::max(c, std::abs(samples[i]) *
                        std::pow(1.0 + x * x, decay_exponent / 2.0));
  }
  return c;
}

namespace {

double step_d(const Grid& g) { return g.step.convert_to<double>(); }

// Model-based bound on the off-grid p-th power mass, via
// (1+x^2)^{-pd/2} <= |x|^{-pd}.
double tail_power(const SampledSpectrum& u, double p) {
  if (std::isinf(u.decay_exponent)) return 0.0;
  double pd = p * u.decay_exponent;
  double c = u.decay_constant();
  if (c == 0.0) return 0.0;
  double xl = std::abs(u.grid.x_min.convert_to<double>());
  double xr = std::abs(u.grid.x_max.convert_to<double>());
  if (pd <= 1.0 || xl < 1.0 || xr < 1.0)
    return std::numeric_limits<double>::infinity();
  double cp = std::pow(c, p);
  return cp * (std::pow(xl, 1.0 - pd) + std::pow(xr, 1.0 - pd)) / (pd - 1.0);
}

}  // namespace

NormEstimate norm_ap(const SampledSpectrum& u, double p) {
  u.validate();
  if (!(p >= 1.0)) throw OutOfRange("norm requires p >= 1");
  double quad = 0.0;
  for (std::size_t i = 0; i + 1 < u.samples.size(); ++i)
    quad += std::pow(std::abs(u.samples[i]), p);
  quad *= step_d(u.grid);
  double with_tail = quad + tail_power(u, p);
  NormEstimate out;
  out.value = std::pow(quad, 1.0 / p);
  out.err = std::pow(with_tail, 1.0 / p) - out.value + u.err;
  return out;
}

double seminorm_triple(const SampledSpectrum& u) {
  u.validate();
  if (!(u.decay_exponent >= 2.0)) throw DecayTooWeak("seminorm needs decay exponent >= 2");
  double grid_max = 0.0;
  for (std::size_t i = 0; i < u.samples.size(); ++i) {
    double x = u.grid.node_d(i);
    grid_max = std::max(grid_max, (1.0 + x * x) * std::abs(u.samples[i]));
  }
  if (!std::isinf(u.decay_exponent)) {
    double c = u.decay_constant();
    double x = std::min(std::abs(u.grid.x_min.convert_to<double>()),
                        std::abs(u.grid.x_max.convert_to<double>()));
    double off = c * std::pow(1.0 + x * x, 1.0 - u.decay_exponent / 2.0);
    if (off > grid_max * (1.0 + 1e-12))
      throw DecayTooWeak("declared decay cannot pin the supremum to the grid");
  }
  return 10.0 * grid_max;
}

SampledSpectrum haar_phi(std::size_t k, const Grid& grid, double p) {
  grid.validate();
  if (k < 1) throw OutOfRange("haar index starts at 1");
  if (!(p >= 1.0)) throw OutOfRange("haar normalization requires p >= 1");

  Rational lo(0), hi(1);
  bool mother = k >= 2;
  std::size_t j = 0;
  if (mother) {
    std::size_t m = k - 1;
    while ((std::size_t(2) << j) <= m) ++j;  // 2^j <= m < 2^{j+1}
    std::size_t i = m - (std::size_t(1) << j);
    lo = Rational(i) / Rational(BigInt(1) << j);
    hi = Rational(i + 1) / Rational(BigInt(1) << j);
  }
  Rational mid = (lo + hi) / 2;

  auto ilo = grid.index_of(lo);
  auto ihi = grid.index_of(hi);
  auto imid = grid.index_of(mid);
  if (!ilo || !ihi) throw OutOfRange("haar support exceeds the grid");
  if (mother && !imid) throw OutOfRange("haar support misaligned with the grid step");

  Rational meas = hi - lo;
  double c = std::pow(meas.convert_to<double>(), -1.0 / p);

  SampledSpectrum out;
  out.grid = grid;
  out.samples.assign(grid.size(), {0.0, 0.0});
  if (mother) {
    for (std::size_t i = *ilo; i < *imid; ++i) out.samples[i] = {c, 0.0};
    for (std::size_t i = *imid; i < *ihi; ++i) out.samples[i] = {-c, 0.0};
  } else {
    for (std::size_t i = *ilo; i < *ihi; ++i) out.samples[i] = {c, 0.0};
  }
  out.decay_exponent = std::numeric_limits<double>::infinity();
  out.err = 0.0;
  return out;
}

SampledSpectrum mul_periodic(const SampledSpectrum& u, const TrigPoly& f) {
  u.validate();
  if (!f.has_integer_spectrum())
    throw OutOfRange("periodic multiplier needs an integer spectrum");

  long spu = u.grid.steps_per_unit().convert_to<long>();
  long n_samples = static_cast<long>(u.samples.size());
  SampledSpectrum out;
  out.grid = u.grid;
  out.samples.assign(u.samples.size(), {0.0, 0.0});
  double norm1 = 0.0;
  for (const auto& [freq, coef] : f.terms()) {
    long n = rat_num(freq).convert_to<long>();
    std::complex<double> a(coef.re.to_double(), coef.im.to_double());
    norm1 += std::abs(a);
    long off = n * spu;
    long lo = std::max(0L, off);
    long hi = std::min(n_samples, n_samples + off);
    for (long i = lo; i < hi; ++i) out.samples[i] += a * u.samples[i - off];
  }

  double edge = 0.0;
  if (!std::isinf(u.decay_exponent)) {
    double x = std::min(std::abs(u.grid.x_min.convert_to<double>()),
                        std::abs(u.grid.x_max.convert_to<double>()));
    edge = u.decay_constant() * std::pow(1.0 + x * x, -u.decay_exponent / 2.0);
  }
  out.decay_exponent = u.decay_exponent;
  out.err = norm1 * (u.err + edge);
  return out;
}

SampledSpectrum mul_poly(const SampledSpectrum& u, const TrigPoly& P) {
  u.validate();
  long n_samples = static_cast<long>(u.samples.size());
  SampledSpectrum out;
  out.grid = u.grid;
  out.samples.assign(u.samples.size(), {0.0, 0.0});

  double norm1 = 0.0;
  double offgrid_mass = 0.0;
  for (const auto& [freq, coef] : P.terms()) {
    std::complex<double> a(coef.re.to_double(), coef.im.to_double());
    norm1 += std::abs(a);
    Rational q = freq / u.grid.step;  // shift measured in steps
    BigInt whole = rat_floor(q);
    Rational theta_r = q - Rational(whole);
    long base = whole.convert_to<long>();
    double theta = theta_r.convert_to<double>();
    if (theta_r != 0) offgrid_mass += std::abs(a);

    auto add_shift = [&](long off, double w) {
      if (w == 0.0) return;
      std::complex<double> aw = a * w;
      long lo = std::max(0L, off);
      long hi = std::min(n_samples, n_samples + off);
      for (long i = lo; i < hi; ++i) out.samples[i] += aw * u.samples[i - off];
    };
    add_shift(base, 1.0 - theta);
    add_shift(base + 1, theta);
  }

  double maxdd = 0.0;
  for (std::size_t i = 1; i + 1 < u.samples.size(); ++i)
    maxdd = std::max(maxdd,
                     std::abs(u.samples[i + 1] - 2.0 * u.samples[i] + u.samples[i - 1]));

  double edge = 0.0;
  if (!std::isinf(u.decay_exponent)) {
    double x = std::min(std::abs(u.grid.x_min.convert_to<double>()),
                        std::abs(u.grid.x_max.convert_to<double>()));
    edge = u.decay_constant() * std::pow(1.0 + x * x, -u.decay_exponent / 2.0);
  }
  out.decay_exponent = u.decay_exponent;
  out.err = norm1 * (u.err + edge) + offgrid_mass * maxdd / 8.0;
  return out;
}

std::vector<double> sep_spec_probe(const SampledSpectrum& u, const TrigPoly& f,
                                   double p, const std::vector<long>& nu_list) {
  for (std::size_t i = 1; i < nu_list.size(); ++i)
    if (nu_list[i] <= nu_list[i - 1]) throw OutOfRange("dilation list must increase");
  std::vector<double> out;
  out.reserve(nu_list.size());
  for (long nu : nu_list) {
    if (nu < 1) throw OutOfRange("dilation must be >= 1");
    out.push_back(norm_ap(mul_periodic(u, dilate(f, BigInt(nu))), p).value);
  }
  return out;
}

}  // namespace frameforge
