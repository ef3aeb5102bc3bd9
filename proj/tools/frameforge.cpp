// Command-line surface: certify, scan, materialize, build, expand, and
// emit machine-readable artifacts (JSON for certificates and plans, CSV
// for curves, optional SVG of error curves).
//
// Exit codes: 0 success, 1 usage, 2 infeasible or certificate-invalid,
// 3 stage failure.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <frameforge/apspace.hpp>
#include <frameforge/errors.hpp>
#include <frameforge/framebuilder.hpp>
#include <frameforge/jsonio.hpp>
#include <frameforge/kernels.hpp>
#include <frameforge/localization.hpp>
#include <frameforge/numeric.hpp>

namespace {

using frameforge::BigInt;
using frameforge::Rational;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitStage = 3;

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    frameforge::atomic_write(out_path, content);
}

json ivl_json(const frameforge::Ivl& v) {
  return json{{"lo", v.lo.mantissa_exp_str()},
              {"hi", v.hi.mantissa_exp_str()},
              {"approx_lo", v.lo.to_double()},
              {"approx_hi", v.hi.to_double()}};
}

frameforge::KernelSpec parse_kernel(const std::string& kind,
                                    const std::string& h,
                                    const std::string& a) {
  frameforge::KernelSpec spec;
  if (kind == "triangle")
    spec.kind = frameforge::KernelKind::Triangle;
  else if (kind == "trapezoid")
    spec.kind = frameforge::KernelKind::Trapezoid;
  else if (kind == "nonneg")
    spec.kind = frameforge::KernelKind::NonnegPhi;
  else
    throw frameforge::OutOfRange("unknown kernel kind: " + kind);
  spec.h = frameforge::rat_parse(h);
  spec.a = a.empty() ? Rational(1, 4) : frameforge::rat_parse(a);
  spec.validate();
  return spec;
}

int cmd_kernel_info(const std::string& kind, const std::string& h,
                    const std::string& a, double p, long coeffs,
                    const std::string& out) {
  frameforge::KernelSpec spec = parse_kernel(kind, h, a);

  json sampled = json::array();
  for (long n = 0; n <= coeffs; ++n)
    sampled.push_back(json{{"n", n},
                           {"coeff", ivl_json(frameforge::kernel_coeff_ivl(
                                         spec, BigInt(n)))}});

  frameforge::NormReport a1 = frameforge::norm_bound_check(spec, 1.0);
  frameforge::NormReport ap = frameforge::norm_bound_check(spec, p);
  auto norm_json = [](const frameforge::NormReport& r) {
    return json{{"p", r.p},
                {"degree", r.degree.str()},
                {"truncated", ivl_json(r.truncated_norm)},
                {"upper", ivl_json(r.norm_upper)},
                {"within_bound", r.within_bound}};
  };

  json j{{"precision_bits", static_cast<long>(frameforge::default_precision())},
         {"kind", spec.kind_name()},
         {"h", frameforge::rat_str(spec.h)},
         {"p", p},
         {"coeffs_sampled", sampled},
         {"norms", json{{"A1", norm_json(a1)}, {"Ap", norm_json(ap)}}},
         {"bounds", json{{"analytic", ap.analytic_bound.hi.to_double()},
                         {"computed", ap.norm_upper.hi.to_double()}}}};
  if (spec.kind == frameforge::KernelKind::NonnegPhi) {
    j["a"] = frameforge::rat_str(spec.a);
    frameforge::NonnegReport rep = frameforge::nonneg_check(spec);
    json table = json::array();
    for (const auto& [t, v] : rep.breakpoint_values)
      table.push_back(json{{"t", frameforge::rat_str(t)},
                           {"value", frameforge::rat_str(v)}});
    j["nonneg"] = json{{"breakpoints", table},
                       {"breakpoints_nonneg", rep.breakpoints_nonneg},
                       {"vanishes_on_bands", rep.vanishes_on_bands},
                       {"coeff_check_limit", rep.coeff_check_limit.str()},
                       {"coeffs_nonneg", rep.coeffs_nonneg},
                       {"min_coeff", ivl_json(rep.min_coeff)},
                       {"zero_coeff_is_one", rep.zero_coeff_is_one}};
  }
  emit(out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_lemma_certify(double p, double eps, bool nonneg,
                      const std::string& out) {
  frameforge::LocalizationParams params =
      frameforge::solve_params(p, eps, nonneg);
  frameforge::LocalizationCertificate cert =
      frameforge::certify_report(params);
  emit(out, frameforge::certificate_to_json(cert));
  if (!cert.valid) {
    std::cerr << "certificate invalid at entry: " << cert.failure << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}

int cmd_lemma_instance(double p, double eps, long n_factors, long deg,
                       const std::string& h, const std::string& a,
                       bool nonneg, const std::string& out) {
  frameforge::LocalizationParams params;
  params.p = p;
  params.eps = eps;
  params.delta = frameforge::Real(0.0);
  params.h = frameforge::Real::from_rational(frameforge::rat_parse(h));
  params.N = n_factors;
  params.deg_f = deg;
  params.deg_g = deg;
  params.nu = 4 * BigInt(deg) + 1;
  params.nonneg = nonneg;
  if (!a.empty()) params.a = frameforge::rat_parse(a);

  frameforge::MaterializedInstance inst = frameforge::materialize(params);
  frameforge::BruteReport rep = frameforge::brute_check(inst);

  json splits = json::array();
  for (const frameforge::SplitCheck& s : rep.splits)
    splits.push_back(json{{"l", s.l.str()},
                          {"complete_levels", s.s.str()},
                          {"partial_order", s.m.str()},
                          {"exact", s.exact},
                          {"measured_norm", s.measured_norm},
                          {"analytic_bound", s.analytic_bound}});
  json j{{"precision_bits", static_cast<long>(frameforge::default_precision())},
         {"p", p},
         {"N", params.N.str()},
         {"deg", deg},
         {"h", frameforge::rat_parse(h) == 0
                   ? "0"
                   : frameforge::rat_str(frameforge::rat_parse(h))},
         {"nonneg", nonneg},
         {"norm_rel_err", rep.norm_rel_err},
         {"zero_coeff_matches", rep.zero_coeff_matches},
         {"identity_exact", rep.identity_exact},
         {"splits", splits},
         {"all_splits_exact", rep.all_splits_exact},
         {"bounds_respected", rep.bounds_respected}};
  emit(out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_threshold_scan(double eps, double p_min, double p_max, long steps,
                       const std::string& out) {
  if (steps < 2) throw frameforge::OutOfRange("scan needs at least 2 points");
  if (!(p_min < p_max))
    throw frameforge::OutOfRange("scan needs p-min < p-max");
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (long i = 0; i < steps; ++i)
    grid[static_cast<std::size_t>(i)] =
        p_min + (p_max - p_min) * static_cast<double>(i) /
                    static_cast<double>(steps - 1);
  std::vector<frameforge::ScanRow> rows = frameforge::scan_threshold(eps, grid);
  emit(out, frameforge::scan_to_csv(rows));
  return kExitOk;
}

frameforge::Grid parse_grid(const std::string& text) {
  auto c1 = text.find(':');
  auto c2 = text.rfind(':');
  if (c1 == std::string::npos || c2 == c1)
    throw frameforge::OutOfRange("grid format is MIN:MAX:STEP");
  frameforge::Grid g;
  g.x_min = frameforge::rat_parse(text.substr(0, c1));
  g.x_max = frameforge::rat_parse(text.substr(c1 + 1, c2 - c1 - 1));
  g.step = frameforge::rat_parse(text.substr(c2 + 1));
  g.validate();
  return g;
}

int cmd_frame_build(int stages, double p, const std::string& grid,
                    const std::vector<double>& eta, const std::string& out) {
  frameforge::FrameBuildOptions opt;
  opt.stages = stages;
  opt.p = p;
  if (!grid.empty()) opt.grid = parse_grid(grid);
  if (!eta.empty()) opt.eta = eta;

  frameforge::FramePlan plan = frameforge::build_frame(opt);
  frameforge::write_plan(out, plan);
  frameforge::atomic_write(out + ".lambda.csv", frameforge::lambda_to_csv(plan));

  std::cout << "stages=" << plan.stages.size()
            << " points=" << plan.lambda.size()
            << " min_gap=" << frameforge::rat_str(plan.min_gap)
            << " basis_distance=" << plan.g_dist
            << " functional_norm=" << plan.k_hat << "\n"
            << "plan: " << out << "\n";
  return kExitOk;
}

std::string svg_error_curve(const frameforge::ExpandReport& rep) {
  const double width = 800.0, height = 400.0, mx = 60.0, my = 30.0;
  double lo = 0.0, hi = -300.0;
  for (const frameforge::ExpandRow& r : rep.rows) {
    double e = std::log10(std::max(r.error, 1e-300));
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi <= lo) hi = lo + 1.0;
  auto xmap = [&](double j) {
    return mx + (width - 2 * mx) * (j - 1.0) /
                    std::max<double>(1.0, static_cast<double>(rep.rows.size()) - 1.0);
  };
  auto ymap = [&](double e) {
    return height - my - (height - 2 * my) * (e - lo) / (hi - lo);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<line x1=\"" << mx << "\" y1=\"" << height - my << "\" x2=\""
     << width - mx << "\" y2=\"" << height - my
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << mx << "\" y1=\"" << my << "\" x2=\"" << mx
     << "\" y2=\"" << height - my << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << mx << "\" y=\"" << my - 8
     << "\" font-size=\"12\">log10 error, 10^" << hi << " .. 10^" << lo
     << "</text>\n"
     << "<text x=\"" << width - mx << "\" y=\"" << height - my + 20
     << "\" font-size=\"12\" text-anchor=\"end\">terms 1 .. "
     << rep.rows.size() << "</text>\n<polyline fill=\"none\" "
     << "stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (const frameforge::ExpandRow& r : rep.rows)
    os << xmap(static_cast<double>(r.terms)) << ','
       << ymap(std::log10(std::max(r.error, 1e-300))) << ' ';
  os << "\"/>\n";
  for (const frameforge::ExpandRow& r : rep.rows)
    if (r.boundary)
      os << "<circle cx=\"" << xmap(static_cast<double>(r.terms)) << "\" cy=\""
         << ymap(std::log10(std::max(r.error, 1e-300)))
         << "\" r=\"2.5\" fill=\"firebrick\"/>\n";
  os << "</svg>\n";
  return os.str();
}

int cmd_frame_expand(const std::string& plan_path, const std::string& input,
                     const std::string& terms, const std::string& out,
                     const std::string& svg) {
  frameforge::FramePlan plan = frameforge::read_plan(plan_path);

  frameforge::SampledSpectrum f;
  if (input.rfind("haar:", 0) == 0) {
    long k = std::stol(input.substr(5));
    if (k < 1) throw frameforge::OutOfRange("haar index starts at 1");
    f = frameforge::haar_phi(static_cast<std::size_t>(k), plan.grid, plan.p);
  } else {
    f = frameforge::read_spectrum(input);
  }

  long count = terms == "all" ? static_cast<long>(plan.lambda.size())
                              : std::stol(terms);
  frameforge::ExpandReport rep = frameforge::expand_frame(plan, f, count);
  emit(out, frameforge::expand_to_csv(rep));
  if (!svg.empty()) frameforge::atomic_write(svg, svg_error_curve(rep));

  std::cerr << "terms=" << count << " terminal_error=" << rep.terminal_error
            << " terminal_err_budget=" << rep.terminal_err_budget << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiener-space kernel, localization, and frame toolkit"};
  app.require_subcommand(1);

  long precision = 128;
  if (const char* env = std::getenv("FRAMEFORGE_PRECISION"))
    precision = std::atol(env);
  app.add_option("--precision", precision,
                 "mantissa precision in bits (>= 64)");
  long seed = 0;
  app.add_option("--seed", seed, "reserved; all commands are deterministic");

  // kernel info
  auto* kernel = app.add_subcommand("kernel", "closed-form kernels");
  kernel->require_subcommand(1);
  auto* info = kernel->add_subcommand("info", "coefficients and norm bounds");
  info->set_help_flag("--help", "print help");
  std::string ki_kind, ki_h, ki_a, ki_out;
  double ki_p = 2.0;
  long ki_coeffs = 8;
  info->add_option("--kind", ki_kind, "triangle|trapezoid|nonneg")->required();
  info->add_option("--h", ki_h, "width parameter, a rational like 1/8")->required();
  info->add_option("--a", ki_a, "band center (nonneg kind)");
  info->add_option("--p", ki_p, "coefficient-norm exponent");
  info->add_option("--coeffs", ki_coeffs, "how many coefficients to sample");
  info->add_option("--out", ki_out, "output file (default stdout)");

  // lemma certify / instance
  auto* lemma = app.add_subcommand("lemma", "localization certificates");
  lemma->require_subcommand(1);
  auto* certify = lemma->add_subcommand("certify", "solve and certify");
  double lc_p = 2.0, lc_eps = 0.5;
  bool lc_nonneg = false;
  std::string lc_out;
  certify->add_option("--p", lc_p, "exponent")->required();
  certify->add_option("--eps", lc_eps, "target distance")->required();
  certify->add_flag("--nonneg", lc_nonneg, "nonnegative variant");
  certify->add_option("--out", lc_out, "output file (default stdout)");

  auto* instance = lemma->add_subcommand("instance", "materialize and cross-check");
  instance->set_help_flag("--help", "print help");
  double li_p = 2.0, li_eps = 0.5;
  long li_n = 1, li_deg = 8;
  std::string li_h, li_a, li_out;
  bool li_nonneg = false;
  instance->add_option("--p", li_p, "exponent")->required();
  instance->add_option("--eps", li_eps, "target distance");
  instance->add_option("--N", li_n, "factor count (<= 4)")->required();
  instance->add_option("--deg", li_deg, "truncation degree (<= 64)")->required();
  instance->add_option("--h", li_h, "width parameter, rational")->required();
  instance->add_option("--a", li_a, "band center (nonneg)");
  instance->add_flag("--nonneg", li_nonneg, "nonnegative variant");
  instance->add_option("--out", li_out, "output file (default stdout)");

  // threshold scan
  auto* threshold = app.add_subcommand("threshold", "feasibility threshold");
  threshold->require_subcommand(1);
  auto* scan = threshold->add_subcommand("scan", "feasibility over a p grid");
  double ts_eps = 0.5, ts_pmin = 1.3, ts_pmax = 2.0;
  long ts_steps = 15;
  std::string ts_out;
  scan->add_option("--eps", ts_eps, "target distance")->required();
  scan->add_option("--p-min", ts_pmin, "grid start")->required();
  scan->add_option("--p-max", ts_pmax, "grid end")->required();
  scan->add_option("--steps", ts_steps, "number of grid points (inclusive)")
      ->required();
  scan->add_option("--out", ts_out, "output CSV (default stdout)");

  // frame build / expand
  auto* frame = app.add_subcommand("frame", "staged frame pipeline");
  frame->require_subcommand(1);
  auto* build = frame->add_subcommand("build", "run the stage pipeline");
  int fb_stages = 2;
  double fb_p = 1.8;
  std::string fb_grid, fb_out = "plan.json";
  std::vector<double> fb_eta;
  build->add_option("--stages", fb_stages, "stage count")->required();
  build->add_option("--p", fb_p, "exponent")->required();
  build->add_option("--grid", fb_grid, "grid as MIN:MAX:STEP, rationals");
  build->add_option("--eta", fb_eta, "per-stage fit targets");
  build->add_option("--out", fb_out, "plan file (default plan.json)");

  auto* expand = frame->add_subcommand("expand", "greedy expansion trace");
  std::string fe_plan, fe_input = "haar:1", fe_terms = "all", fe_out, fe_svg;
  expand->add_option("--plan", fe_plan, "plan file from frame build")->required();
  expand->add_option("--input", fe_input, "haar:k or a spectrum file");
  expand->add_option("--terms", fe_terms, "term count or 'all'");
  expand->add_option("--out", fe_out, "output CSV (default stdout)");
  expand->add_option("--svg", fe_svg, "also render the error curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (precision < 64) {
    std::cerr << "precision must be at least 64 bits\n";
    return kExitUsage;
  }
  frameforge::set_default_precision(static_cast<mpfr_prec_t>(precision));

  try {
    if (info->parsed())
      return cmd_kernel_info(ki_kind, ki_h, ki_a, ki_p, ki_coeffs, ki_out);
    if (certify->parsed())
      return cmd_lemma_certify(lc_p, lc_eps, lc_nonneg, lc_out);
    if (instance->parsed())
      return cmd_lemma_instance(li_p, li_eps, li_n, li_deg, li_h, li_a,
                                li_nonneg, li_out);
    if (scan->parsed())
      return cmd_threshold_scan(ts_eps, ts_pmin, ts_pmax, ts_steps, ts_out);
    if (build->parsed())
      return cmd_frame_build(fb_stages, fb_p, fb_grid, fb_eta, fb_out);
    if (expand->parsed())
      return cmd_frame_expand(fe_plan, fe_input, fe_terms, fe_out, fe_svg);
    std::cerr << "no command selected\n";
    return kExitUsage;
  } catch (const frameforge::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const frameforge::ChainBroken& e) {
    std::cerr << "certificate failed: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const frameforge::MismatchDetected& e) {
    std::cerr << "cross-check failed: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const frameforge::StageFailed& e) {
    std::cerr << "stage failed: " << e.what() << "\n";
    return kExitStage;
  } catch (const frameforge::CollisionDetected& e) {
    std::cerr << "enumeration collision: " << e.what() << "\n";
    return kExitStage;
  } catch (const frameforge::NotDiagonallyDominant& e) {
    std::cerr << "basis inversion failed: " << e.what() << "\n";
    return kExitStage;
  } catch (const frameforge::BoundViolated& e) {
    std::cerr << "bound violated: " << e.what() << "\n";
    return kExitStage;
  } catch (const frameforge::SingularSystem& e) {
    std::cerr << "singular fit: " << e.what() << "\n";
    return kExitStage;
  } catch (const frameforge::IoFailed& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const frameforge::OutOfRange& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const frameforge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
}
