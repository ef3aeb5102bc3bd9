#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

using nlohmann::json;

const std::string kCli = FRAMEFORGE_CLI_PATH;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, bool keep_stderr = false) {
  std::string cmd = kCli + " " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  FILE* f = fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  std::string s;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, n);
  fclose(f);
  return s;
}

struct FileGuard {
  std::vector<std::string> paths;
  ~FileGuard() {
    for (const auto& p : paths) std::remove(p.c_str());
  }
};

}  // namespace

TEST_CASE("usage and error exit codes") {
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("kernel info --kind triangle").code == 1);  // --h is required
  CHECK(run_cli("kernel info --kind triangle --h 1/2").code == 1);
  CHECK(run_cli("kernel info --kind nosuch --h 1/8").code == 1);
  CHECK(run_cli("lemma certify --p 1.5 --eps 0.5").code == 2);
  CHECK(run_cli("--precision 32 kernel info --kind triangle --h 1/8").code == 1);
  CHECK(run_cli("frame expand --plan /nonexistent/plan.json").code == 1);
}

TEST_CASE("kernel info emits certified norms as json") {
  RunResult r = run_cli("kernel info --kind triangle --h 1/8 --p 2.0");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j.at("kind") == "triangle");
  CHECK(j.at("h") == "1/8");
  CHECK(j.at("precision_bits").get<long>() == 128);
  CHECK(j.at("bounds").at("analytic").get<double>() ==
        doctest::Approx(0.3535533905932738).epsilon(1e-12));
  CHECK(j.at("bounds").at("computed").get<double>() ==
        doctest::Approx(0.2886751346500132).epsilon(1e-12));
  CHECK(j.at("norms").at("Ap").at("within_bound").get<bool>());
  CHECK(j.at("norms").at("A1").at("within_bound").get<bool>());
  CHECK(j.at("norms").at("Ap").at("truncated").at("approx_hi").get<double>() <=
        j.at("bounds").at("analytic").get<double>() + 1e-12);
  CHECK(j.at("norms").at("A1").at("truncated").at("approx_hi").get<double>() <=
        1.0 + 1e-12);

  const json& c0 = j.at("coeffs_sampled").at(0);
  CHECK(c0.at("n").get<long>() == 0);
  CHECK(c0.at("coeff").at("approx_hi").get<double>() == doctest::Approx(0.125));

  RunResult rn =
      run_cli("kernel info --kind nonneg --h 1/32 --a 1/4 --coeffs 4");
  REQUIRE(rn.code == 0);
  json jn = json::parse(rn.out);
  CHECK(jn.at("nonneg").at("coeffs_nonneg").get<bool>());
  CHECK(jn.at("nonneg").at("vanishes_on_bands").get<bool>());
}

TEST_CASE("certificates are valid and byte-stable across runs") {
  FileGuard g;
  std::string a = tmp_path("ff_cert_a.json");
  std::string b = tmp_path("ff_cert_b.json");
  g.paths = {a, b};

  REQUIRE(run_cli("lemma certify --p 2.0 --eps 0.5 --out " + a).code == 0);
  REQUIRE(run_cli("lemma certify --p 2.0 --eps 0.5 --out " + b).code == 0);
  std::string ta = slurp(a);
  CHECK(ta == slurp(b));

  json j = json::parse(ta);
  CHECK(j.at("valid").get<bool>());
  CHECK(j.at("params").at("N") == "9436");
  CHECK(j.at("conditions").at("sup_coeff").at("approx_hi").get<double>() ==
        doctest::Approx(0.000105977108944468).epsilon(1e-9));
  CHECK(j.at("conditions").at("section").at("approx_hi").get<double>() <= 3.0);
  for (const json& e : j.at("chain")) CHECK(e.at("ok").get<bool>());

  RunResult nn = run_cli("lemma certify --p 2.0 --eps 0.5 --nonneg");
  REQUIRE(nn.code == 0);
  json jn = json::parse(nn.out);
  CHECK(jn.at("valid").get<bool>());
  CHECK(jn.at("mean_is_one").get<bool>());
  CHECK(jn.at("coeffs_nonneg").get<bool>());
}

TEST_CASE("tiny instances pass the brute cross-check end to end") {
  RunResult r =
      run_cli("lemma instance --p 2.0 --N 2 --deg 16 --h 1/8");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j.at("identity_exact").get<bool>());
  CHECK(j.at("all_splits_exact").get<bool>());
  CHECK(j.at("bounds_respected").get<bool>());
  CHECK(j.at("zero_coeff_matches").get<bool>());
  CHECK(j.at("norm_rel_err").get<double>() < 1e-11);
  CHECK(j.at("N") == "2");
  CHECK(j.at("deg").get<long>() == 16);
  CHECK(!j.at("splits").empty());
}

TEST_CASE("threshold scan writes the csv grid") {
  FileGuard g;
  std::string out = tmp_path("ff_scan.csv");
  g.paths = {out};
  REQUIRE(run_cli("threshold scan --eps 0.5 --p-min 1.9 --p-max 2.0 --steps 3 --out " +
                  out)
              .code == 0);
  std::string csv = slurp(out);
  CHECK(csv.rfind("p,feasible,n_exact,n_min,ln_n_min,h,delta\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("\n2,1,1,11677,") != std::string::npos);
}

TEST_CASE("frame build and expand round-trip through files") {
  // The plan header names its sample sidecar by basename, so the
  // determinism comparison uses the same file name in two directories.
  std::string dir_a = tmp_path("ff_build_a");
  std::string dir_b = tmp_path("ff_build_b");
  std::filesystem::create_directories(dir_a);
  std::filesystem::create_directories(dir_b);
  std::string plan = dir_a + "/plan.json";
  std::string plan2 = dir_b + "/plan.json";
  std::string trace = tmp_path("ff_trace.csv");
  std::string svg = tmp_path("ff_curve.svg");
  FileGuard g;
  g.paths = {plan,  plan + ".bin",  plan + ".lambda.csv",
             plan2, plan2 + ".bin", plan2 + ".lambda.csv",
             trace, svg};

  RunResult b = run_cli("frame build --stages 2 --p 1.8 --out " + plan, true);
  REQUIRE(b.code == 0);
  CHECK(b.out.find("stages=2") != std::string::npos);
  CHECK(b.out.find("points=2048") != std::string::npos);
  CHECK(std::filesystem::exists(plan + ".bin"));
  CHECK(std::filesystem::exists(plan + ".lambda.csv"));

  // Determinism: a second build writes identical bytes.
  REQUIRE(run_cli("frame build --stages 2 --p 1.8 --out " + plan2).code == 0);
  CHECK(slurp(plan) == slurp(plan2));
  CHECK(slurp(plan + ".bin") == slurp(plan2 + ".bin"));

  std::string lcsv = slurp(plan + ".lambda.csv");
  CHECK(lcsv.rfind("j,k,m,n,lambda,radius,anchor,scale_re,scale_im\n", 0) == 0);
  CHECK(std::count(lcsv.begin(), lcsv.end(), '\n') == 2049);

  RunResult e = run_cli("frame expand --plan " + plan +
                            " --input haar:1 --terms all --out " + trace +
                            " --svg " + svg,
                        true);
  REQUIRE(e.code == 0);
  CHECK(e.out.find("terms=2048") != std::string::npos);

  std::string tcsv = slurp(trace);
  REQUIRE(std::count(tcsv.begin(), tcsv.end(), '\n') == 2049);
  // Terminal row: the expansion captured the pattern to the stage-one
  // fit residual.
  std::size_t last_nl = tcsv.find_last_of('\n', tcsv.size() - 2);
  std::string last_row = tcsv.substr(last_nl + 1);
  CHECK(last_row.rfind("2048,", 0) == 0);
  std::size_t col = 0;
  double err = -1.0;
  for (std::size_t i = 0, start = 0; i <= last_row.size(); ++i) {
    if (i == last_row.size() || last_row[i] == ',') {
      if (col == 4) err = std::stod(last_row.substr(start, i - start));
      ++col;
      start = i + 1;
    }
  }
  CHECK(err > 0.0);
  CHECK(err < 1e-3);

  std::string body = slurp(svg);
  CHECK(body.rfind("<svg", 0) == 0);
  CHECK(body.find("</svg>") != std::string::npos);
}
