#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "frameforge/errors.hpp"
#include "frameforge/jsonio.hpp"
#include "frameforge/localization.hpp"

using namespace frameforge;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

struct FileGuard {
  std::string path;
  explicit FileGuard(std::string p) : path(std::move(p)) {}
  ~FileGuard() {
    std::remove(path.c_str());
    std::remove((path + ".bin").c_str());
  }
};

}  // namespace

TEST_CASE("atomic write replaces content and read round-trips") {
  FileGuard f(tmp_path("frameforge_io_basic.txt"));
  atomic_write(f.path, "first");
  CHECK(read_file(f.path) == "first");
  atomic_write(f.path, "second, longer than before");
  CHECK(read_file(f.path) == "second, longer than before");
  CHECK(!std::filesystem::exists(f.path + ".tmp"));
  CHECK_THROWS_AS(read_file(tmp_path("frameforge_io_missing.txt")), IoFailed);
}

TEST_CASE("trig polynomials round-trip bit for bit") {
  TrigPoly f;
  f.set_term(Freq(Rational(-7, 3)), Cplx(Real(1L) / Real(3L), Real(-2L)));
  f.set_term(Freq(0), Cplx::of(1.5));
  f.set_term(Freq(12), Cplx(sqrt(Real(2L)), exp(Real(1L))));

  TrigPoly g = trigpoly_from_json(trigpoly_to_json(f));
  REQUIRE(g.support_size() == f.support_size());
  for (const auto& [fr, c] : f.terms()) {
    // Exact value equality; the reparsed mantissa may normalize at a
    // different precision but must denote the same extended real.
    Cplx d = g.coeff(fr);
    CHECK((d.re - c.re).is_zero());
    CHECK((d.im - c.im).is_zero());
  }

  CHECK_THROWS_AS(trigpoly_from_json("not json"), IoFailed);
  CHECK_THROWS_AS(trigpoly_from_json("{\"terms\": 3}"), IoFailed);
}

TEST_CASE("certificate export carries the chain and conditions") {
  LocalizationCertificate c = certify(solve_params(2.0, 0.5));
  std::string text = certificate_to_json(c);
  CHECK(text.find("\"precision_bits\"") != std::string::npos);
  CHECK(text.find("\"chain\"") != std::string::npos);
  CHECK(text.find("\"sup_coeff\"") != std::string::npos);
  CHECK(text.find("\"valid\": true") != std::string::npos);
  CHECK(text.find("power-growth-log") != std::string::npos);
  // Exact parameters appear as mantissa:exponent strings.
  CHECK(text.find(":") != std::string::npos);
  CHECK(text.find("\"9436\"") != std::string::npos);
}

TEST_CASE("scan rows export as csv") {
  std::vector<ScanRow> rows = scan_threshold(0.5, {1.5, 2.0});
  std::string csv = scan_to_csv(rows);
  CHECK(csv.rfind("p,feasible,n_exact,n_min,ln_n_min,h,delta\n", 0) == 0);
  CHECK(csv.find("\n1.5,0,") != std::string::npos);
  CHECK(csv.find("\n2,1,1,11677,") != std::string::npos);
  // Infeasible rows leave the parameter fields empty.
  std::size_t line15 = csv.find("\n1.5,");
  std::string row15 = csv.substr(line15 + 1, csv.find('\n', line15 + 1) - line15 - 1);
  CHECK(row15 == "1.5,0,0,,,,");
}

TEST_CASE("spectra round-trip through header plus sample blob") {
  Grid g{Rational(-2), Rational(2), Rational(1, 8)};
  SampledSpectrum u;
  u.grid = g;
  u.decay_exponent = 4.0;
  u.err = 0.125;
  u.samples.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.node_d(i);
    u.samples[i] = {std::sin(1.0 + x), std::cos(2.0 * x) / 3.0};
  }

  FileGuard f(tmp_path("frameforge_spec.json"));
  write_spectrum(f.path, u);
  CHECK(std::filesystem::exists(f.path + ".bin"));

  SampledSpectrum v = read_spectrum(f.path);
  CHECK(v.grid == u.grid);
  CHECK(v.decay_exponent == u.decay_exponent);
  CHECK(v.err == u.err);
  REQUIRE(v.samples.size() == u.samples.size());
  for (std::size_t i = 0; i < u.samples.size(); ++i)
    CHECK(v.samples[i] == u.samples[i]);  // bit-identical doubles

  std::string csv = spectrum_to_csv(u);
  CHECK(csv.rfind("x,re,im\n", 0) == 0);
  CHECK(csv.find("\n-2,") != std::string::npos);

  // Infinite declared decay survives the trip.
  u.decay_exponent = std::numeric_limits<double>::infinity();
  write_spectrum(f.path, u);
  CHECK(std::isinf(read_spectrum(f.path).decay_exponent));

  // A missing or truncated blob is an I/O failure, not a crash.
  std::remove((f.path + ".bin").c_str());
  CHECK_THROWS_AS(read_spectrum(f.path), IoFailed);
}

TEST_CASE("plans replay deterministically from disk") {
  FramePlan plan = build_frame(FrameBuildOptions{});
  FileGuard f(tmp_path("frameforge_plan.json"));
  write_plan(f.path, plan);

  FramePlan loaded = read_plan(f.path);
  CHECK(loaded.p == plan.p);
  CHECK(loaded.grid == plan.grid);
  REQUIRE(loaded.stages.size() == plan.stages.size());
  for (std::size_t k = 0; k < plan.stages.size(); ++k) {
    CHECK(loaded.stages[k].nu == plan.stages[k].nu);
    CHECK(loaded.stages[k].eps == plan.stages[k].eps);
    CHECK(loaded.stages[k].window == plan.stages[k].window);
  }
  CHECK(loaded.min_gap == plan.min_gap);
  CHECK(loaded.lambda.size() == plan.lambda.size());
  CHECK(loaded.g_dist == plan.g_dist);  // replay is bit-deterministic
  REQUIRE(loaded.w().samples.size() == plan.w().samples.size());
  for (std::size_t i = 0; i < plan.w().samples.size(); ++i)
    CHECK(loaded.w().samples[i] == plan.w().samples[i]);

  std::string lcsv = lambda_to_csv(plan);
  CHECK(lcsv.rfind("j,k,m,n,lambda,radius,anchor,scale_re,scale_im\n", 0) == 0);
  CHECK(lcsv.find("-28302019/1048576") != std::string::npos);

  ExpandReport rep = expand_frame(plan, haar_phi(1, plan.grid, plan.p), 64);
  std::string ecsv = expand_to_csv(rep);
  CHECK(ecsv.rfind("terms,k,layer,radius,error,err_budget,dist_complete,"
                   "mid_norm,partial_norm,partial_bound,partial_ok,boundary\n",
                   0) == 0);
  CHECK(std::count(ecsv.begin(), ecsv.end(), '\n') == 65);

  // Corrupt header: parse failure surfaces as IoFailed.
  atomic_write(f.path, "{\"p\": ");
  CHECK_THROWS_AS(read_plan(f.path), IoFailed);
}
