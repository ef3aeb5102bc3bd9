#include "frameforge/jsonio.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "frameforge/errors.hpp"
#include "frameforge/numeric.hpp"

namespace frameforge {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string real_str(const Real& r) { return r.mantissa_exp_str(); }

Real real_parse(const std::string& s) {
  if (s == "0") return Real(0.0);
  if (s == "inf") return Real::pos_inf();
  if (s == "-inf") return -Real::pos_inf();
  auto pos = s.find(':');
  if (pos == std::string::npos)
    throw IoFailed("malformed extended-precision literal: " + s);
  try {
    BigInt m(s.substr(0, pos));
    long long e = std::stoll(s.substr(pos + 1));
    if (m == 0) return Real(0.0);
    Rational r = e >= 0 ? Rational(m * (BigInt(1) << e))
                        : Rational(m, BigInt(1) << (-e));
    BigInt am = m < 0 ? BigInt(-m) : m;
    auto bits = static_cast<mpfr_prec_t>(boost::multiprecision::msb(am)) + 2;
    mpfr_prec_t prec = bits > default_precision() ? bits : default_precision();
    return Real::from_rational(r, MPFR_RNDN, prec);
  } catch (const IoFailed&) {
    throw;
  } catch (const std::exception&) {
    throw IoFailed("malformed extended-precision literal: " + s);
  }
}

json ivl_json(const Ivl& v) {
  return json{{"lo", real_str(v.lo)},
              {"hi", real_str(v.hi)},
              {"approx_lo", v.lo.to_double()},
              {"approx_hi", v.hi.to_double()}};
}

json params_json(const LocalizationParams& lp) {
  return json{{"p", lp.p},
              {"eps", lp.eps},
              {"delta", real_str(lp.delta)},
              {"h", real_str(lp.h)},
              {"N", lp.N.str()},
              {"deg_f", lp.deg_f.str()},
              {"deg_g", lp.deg_g.str()},
              {"nu", lp.nu.str()},
              {"nonneg", lp.nonneg},
              {"band_center", rat_str(lp.a)}};
}

LocalizationParams params_parse(const json& j) {
  LocalizationParams lp;
  lp.p = j.at("p").get<double>();
  lp.eps = j.at("eps").get<double>();
  lp.delta = real_parse(j.at("delta").get<std::string>());
  lp.h = real_parse(j.at("h").get<std::string>());
  lp.N = BigInt(j.at("N").get<std::string>());
  lp.deg_f = BigInt(j.at("deg_f").get<std::string>());
  lp.deg_g = BigInt(j.at("deg_g").get<std::string>());
  lp.nu = BigInt(j.at("nu").get<std::string>());
  lp.nonneg = j.at("nonneg").get<bool>();
  lp.a = rat_parse(j.at("band_center").get<std::string>());
  return lp;
}

json poly_json(const TrigPoly& f) {
  json terms = json::array();
  for (const auto& [fr, c] : f.terms())
    terms.push_back(json{{"freq", rat_str(fr)},
                         {"re", real_str(c.re)},
                         {"im", real_str(c.im)}});
  return terms;
}

TrigPoly poly_parse(const json& terms) {
  TrigPoly f;
  for (const auto& t : terms)
    f.set_term(rat_parse(t.at("freq").get<std::string>()),
               Cplx(real_parse(t.at("re").get<std::string>()),
                    real_parse(t.at("im").get<std::string>())));
  return f;
}

json grid_json(const Grid& g) {
  return json{{"x_min", rat_str(g.x_min)},
              {"x_max", rat_str(g.x_max)},
              {"step", rat_str(g.step)}};
}

Grid grid_parse(const json& j) {
  Grid g;
  g.x_min = rat_parse(j.at("x_min").get<std::string>());
  g.x_max = rat_parse(j.at("x_max").get<std::string>());
  g.step = rat_parse(j.at("step").get<std::string>());
  g.validate();
  return g;
}

json decay_json(double d) {
  if (d == std::numeric_limits<double>::infinity()) return json("inf");
  return json(d);
}

double decay_parse(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    throw IoFailed("malformed decay exponent");
  }
  return j.get<double>();
}

void push_le64(std::string& out, double v) {
  auto u = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b)
    out.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
}

double pull_le64(const std::string& in, std::size_t off) {
  std::uint64_t u = 0;
  for (int b = 0; b < 8; ++b)
    u |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[off + b]))
         << (8 * b);
  return std::bit_cast<double>(u);
}

std::string samples_blob(const std::vector<std::complex<double>>& s) {
  std::string out;
  out.reserve(s.size() * 16);
  for (const auto& z : s) {
    push_le64(out, z.real());
    push_le64(out, z.imag());
  }
  return out;
}

std::vector<std::complex<double>> samples_unblob(const std::string& blob,
                                                 std::size_t count) {
  if (blob.size() != count * 16)
    throw IoFailed("sample payload has the wrong length");
  std::vector<std::complex<double>> s(count);
  for (std::size_t i = 0; i < count; ++i)
    s[i] = {pull_le64(blob, 16 * i), pull_le64(blob, 16 * i + 8)};
  return s;
}

std::string basename_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

json parse_doc(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw IoFailed(std::string("not valid JSON: ") + what);
  return j;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoFailed("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  if (is.bad()) throw IoFailed("read failed on " + path);
  return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoFailed("cannot open " + tmp + " for writing");
    os.write(content.data(),
             static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw IoFailed("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoFailed("cannot replace " + path);
}

std::string trigpoly_to_json(const TrigPoly& f) {
  json j{{"precision_bits", static_cast<long>(default_precision())},
         {"terms", poly_json(f)}};
  return j.dump(2) + "\n";
}

TrigPoly trigpoly_from_json(const std::string& text) {
  json j = parse_doc(text, "trig polynomial");
  try {
    return poly_parse(j.at("terms"));
  } catch (const json::exception& e) {
    throw IoFailed(std::string("malformed trig polynomial: ") + e.what());
  }
}

std::string certificate_to_json(const LocalizationCertificate& cert) {
  json chain = json::array();
  for (const ChainEntry& e : cert.chain)
    chain.push_back(json{{"id", e.id},
                         {"ok", e.ok},
                         {"lhs", ivl_json(e.lhs)},
                         {"rhs", ivl_json(e.rhs)},
                         {"margin", real_str(e.margin)},
                         {"margin_approx", e.margin.to_double()}});
  json j{{"precision_bits", static_cast<long>(default_precision())},
         {"params", params_json(cert.params)},
         {"chain", chain},
         {"conditions",
          json{{"sup_coeff", ivl_json(cert.cond_sup_coeff)},
               {"gamma_dist", ivl_json(cert.cond_gamma_dist)},
               {"product_dist", ivl_json(cert.cond_product_dist)},
               {"section", ivl_json(cert.cond_section)}}},
         {"mean_is_one", cert.mean_is_one},
         {"coeffs_nonneg", cert.coeffs_nonneg},
         {"valid", cert.valid},
         {"failure", cert.failure}};
  return j.dump(2) + "\n";
}

std::string scan_to_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "p,feasible,n_exact,n_min,ln_n_min,h,delta\n";
  for (const ScanRow& r : rows) {
    os << fmt(r.p) << ',' << (r.feasible ? 1 : 0) << ','
       << (r.n_exact ? 1 : 0) << ',' << (r.n_exact ? r.n_min.str() : "") << ','
       << (r.feasible ? r.ln_n_min.str(17) : "") << ','
       << (r.feasible ? r.h_used.str(17) : "") << ','
       << (r.feasible ? r.delta_used.str(17) : "") << '\n';
  }
  return os.str();
}

void write_spectrum(const std::string& path, const SampledSpectrum& u) {
  u.validate();
  json j{{"precision_bits", static_cast<long>(default_precision())},
         {"format", "float64-le-interleaved"},
         {"grid", grid_json(u.grid)},
         {"count", u.samples.size()},
         {"decay_exponent", decay_json(u.decay_exponent)},
         {"err", u.err},
         {"data", basename_of(path) + ".bin"}};
  atomic_write(path, j.dump(2) + "\n");
  atomic_write(path + ".bin", samples_blob(u.samples));
}

SampledSpectrum read_spectrum(const std::string& path) {
  json j = parse_doc(read_file(path), "spectrum header");
  SampledSpectrum u;
  std::size_t count = 0;
  try {
    u.grid = grid_parse(j.at("grid"));
    u.decay_exponent = decay_parse(j.at("decay_exponent"));
    u.err = j.at("err").get<double>();
    count = j.at("count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw IoFailed(std::string("malformed spectrum header: ") + e.what());
  }
  u.samples = samples_unblob(read_file(path + ".bin"), count);
  u.validate();
  return u;
}

std::string spectrum_to_csv(const SampledSpectrum& u) {
  std::ostringstream os;
  os << "x,re,im\n";
  for (std::size_t i = 0; i < u.samples.size(); ++i)
    os << fmt(u.grid.node_d(i)) << ',' << fmt(u.samples[i].real()) << ','
       << fmt(u.samples[i].imag()) << '\n';
  return os.str();
}

void write_plan(const std::string& path, const FramePlan& plan) {
  json stages = json::array();
  for (const FrameStage& st : plan.stages) {
    json sigma = json::object();
    for (long nn : st.window)
      sigma[std::to_string(nn)] = rat_str(plan.sigma.at(nn));
    stages.push_back(json{{"k", st.k},
                          {"eta", st.eta},
                          {"eps", st.eps},
                          {"nu", st.nu.str()},
                          {"window", st.window},
                          {"sigma", sigma},
                          {"Q", poly_json(st.Q)},
                          {"gamma_params", params_json(st.gamma_params)},
                          {"achieved", st.achieved},
                          {"gamma_dist", st.gamma_dist},
                          {"contraction", st.contraction},
                          {"r_next", rat_str(st.r_next)}});
  }
  json j{{"precision_bits", static_cast<long>(default_precision())},
         {"p", plan.p},
         {"demo_grade", plan.demo_grade},
         {"grid", grid_json(plan.grid)},
         {"seed",
          json{{"count", plan.u0.samples.size()},
               {"decay_exponent", decay_json(plan.u0.decay_exponent)},
               {"err", plan.u0.err},
               {"data", basename_of(path) + ".bin"}}},
         {"stages", stages}};
  atomic_write(path, j.dump(2) + "\n");
  atomic_write(path + ".bin", samples_blob(plan.u0.samples));
}

namespace {

FramePlan read_plan_impl(const std::string& path) {
  json j = parse_doc(read_file(path), "frame plan");
  FramePlan plan;
  plan.p = j.at("p").get<double>();
  plan.demo_grade = j.at("demo_grade").get<bool>();
  plan.grid = grid_parse(j.at("grid"));

  const json& seed = j.at("seed");
  plan.u0.grid = plan.grid;
  plan.u0.decay_exponent = decay_parse(seed.at("decay_exponent"));
  plan.u0.err = seed.at("err").get<double>();
  plan.u0.samples =
      samples_unblob(read_file(path + ".bin"), seed.at("count").get<std::size_t>());
  plan.u0.validate();
  plan.u_chain.push_back(plan.u0);
  plan.r_current = Rational(0);

  for (const json& sj : j.at("stages")) {
    FrameStage st;
    st.k = sj.at("k").get<int>();
    if (st.k != static_cast<int>(plan.stages.size()) + 1)
      throw IoFailed("plan stages are out of order");
    st.eta = sj.at("eta").get<double>();
    st.eps = sj.at("eps").get<double>();
    st.nu = BigInt(sj.at("nu").get<std::string>());
    st.window = sj.at("window").get<std::vector<long>>();
    st.Q = poly_parse(sj.at("Q"));
    st.gamma_params = params_parse(sj.at("gamma_params"));
    st.achieved = sj.at("achieved").get<double>();
    st.gamma_dist = sj.at("gamma_dist").get<double>();
    st.contraction = sj.at("contraction").get<double>();
    st.r_next = rat_parse(sj.at("r_next").get<std::string>());

    const json& sigma = sj.at("sigma");
    for (long nn : st.window) {
      auto it = sigma.find(std::to_string(nn));
      if (it == sigma.end())
        throw IoFailed("plan window index has no stored frequency");
      Freq s = rat_parse(it->get<std::string>());
      if (plan.sigma.count(nn))
        throw IoFailed("plan window index reused across stages");
      plan.sigma[nn] = s;
      st.d[nn] = {st.Q.coeff(s).re.to_double(), st.Q.coeff(s).im.to_double()};
    }

    // The periodic factors are deterministic functions of their
    // parameters, so the window chain replays instead of being stored.
    MaterializedInstance inst = materialize(st.gamma_params);
    st.gamma = expand(inst.gamma);
    st.P = inst.P;
    SampledSpectrum u_next =
        mul_periodic(plan.u_chain.back(), dilate(st.gamma, st.nu));
    plan.u_chain.push_back(std::move(u_next));
    plan.r_current = st.r_next;
    plan.stages.push_back(std::move(st));
  }

  if (!plan.stages.empty()) {
    enumerate_lambda(plan);
    compute_functionals(plan);
  }
  return plan;
}

}  // namespace

FramePlan read_plan(const std::string& path) {
  // Structural surprises in the document surface as I/O failures; the
  // replay steps keep their own error types.
  try {
    return read_plan_impl(path);
  } catch (const json::exception& e) {
    throw IoFailed(std::string("malformed frame plan: ") + e.what());
  }
}

std::string lambda_to_csv(const FramePlan& plan) {
  std::ostringstream os;
  os << "j,k,m,n,lambda,radius,anchor,scale_re,scale_im\n";
  for (std::size_t i = 0; i < plan.lambda.size(); ++i) {
    const LambdaPoint& pt = plan.lambda[i];
    os << (i + 1) << ',' << pt.k << ',' << pt.m << ',' << pt.n << ','
       << rat_str(pt.lambda) << ','
       << fmt(rat_abs(pt.lambda).convert_to<double>()) << ','
       << pt.n_anchor.str() << ',' << fmt(pt.scale.real()) << ','
       << fmt(pt.scale.imag()) << '\n';
  }
  return os.str();
}

std::string expand_to_csv(const ExpandReport& rep) {
  std::ostringstream os;
  os << "terms,k,layer,radius,error,err_budget,dist_complete,mid_norm,"
        "partial_norm,partial_bound,partial_ok,boundary\n";
  for (const ExpandRow& r : rep.rows) {
    os << r.terms << ',' << r.k << ',' << r.layer << ',' << fmt(r.radius)
       << ',' << fmt(r.error) << ',' << fmt(r.err_budget) << ','
       << fmt(r.dist_complete) << ',' << fmt(r.mid_norm) << ','
       << fmt(r.partial_norm) << ',' << fmt(r.partial_bound) << ','
       << (r.partial_ok ? 1 : 0) << ',' << (r.boundary ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace frameforge
