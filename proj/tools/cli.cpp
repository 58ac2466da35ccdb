#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "membership/error.hpp"
#include "membership/io.hpp"
#include "membership/projkernel.hpp"
#include "membership/quad.hpp"

namespace membership::cli {

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

std::string default_calibration_path() {
  if (const char* env = std::getenv("MEMBERSHIP_CALIBRATION")) return env;
  return "membership-calibration.json";
}

void write_file(const std::string& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(2) << '\n';
}

Theorem default_theorem(const AffineSystem& sys) {
  return sys.r() > 1 ? Theorem::kModule : Theorem::kMacaulayNoether;
}

long resolve_rho(const AffineSystem& sys, const std::string& theorem, const std::optional<long>& rho,
                 std::optional<Theorem>& used) {
  if (rho) return *rho;
  used = theorem.empty() ? default_theorem(sys) : parse_theorem(theorem);
  return rho_for(*used, sys.profile()).rho;
}

// "1.5", "2:-0.5" (re:im), comma separated.
std::vector<cd> parse_point(const std::string& text) {
  std::vector<cd> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    try {
      if (colon == std::string::npos) {
        out.emplace_back(std::stod(tok), 0.0);
      } else {
        out.emplace_back(std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1)));
      }
    } catch (const std::exception&) {
      throw ArgumentError("bad point coordinate '" + tok + "' (use re or re:im)");
    }
  }
  return out;
}

Json cd_json(cd c) { return Json::array({c.real(), c.imag()}); }

Json cd_list(std::span<const cd> v) {
  Json j = Json::array();
  for (const cd& c : v) j.push_back(cd_json(c));
  return j;
}

Json form_json(const FormC& f) {
  Json j = Json::array();
  for (const auto& [mask, c] : f.components()) j.push_back({{"mask", mask}, {"value", cd_json(c)}});
  return j;
}

struct Options {
  std::string system;
  std::string theorem;
  std::optional<long> rho;
  std::string nu_inf;
  std::string certificate;
  std::string out_path;
  std::string calibration = default_calibration_path();
  std::string strategy;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::optional<double> eps;
  std::vector<double> eps_sequence;
  double max_std_error = 1e-2;
  int threads = 0;
  bool serial = false;
  bool no_audit = false;
  long max_rho = 0;
  int n = 1;
  bool recalibrate = false;
  std::optional<double> tolerance;
  std::string dump_point;
  std::string dump_z;
  double tol = 1e-6;
};

int cmd_bounds(const Options& o, std::ostream& out, std::ostream& err) {
  AffineSystem sys = load_system(o.system);
  if (!o.nu_inf.empty()) sys.nu_inf = parse_rational(o.nu_inf);
  const SystemProfile p = sys.profile();
  const Theorem t = o.theorem.empty() ? default_theorem(sys) : parse_theorem(o.theorem);
  const BoundReport r = rho_for(t, p);
  out << bound_report_to_json(r, p).dump(2) << '\n';
  err << "bound (" << to_string(t) << "): rho = " << r.rho << ", N_ko = " << kollar_N(p).get_str()
      << ", N_hi = " << to_string(hickel_N(p)) << ", globally solvable: " << (r.solvable_globally ? "yes" : "no")
      << '\n';
  return kOk;
}

int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
  const AffineSystem sys = load_system(o.system);
  std::optional<Theorem> theorem;
  const long rho = resolve_rho(sys, o.theorem, o.rho, theorem);
  CertifyResult res = certify_module(sys, rho);
  if (auto* inf = std::get_if<Infeasible>(&res)) {
    if (theorem) inf->checklist = hypothesis_checklist(sys, *theorem, rho);
    out << infeasible_to_json(*inf).dump(2) << '\n';
    err << "infeasible at rho = " << rho << " (rank " << inf->rank << " of " << inf->unknowns << " unknowns)\n";
    for (const auto& h : inf->checklist) err << "  [" << h.status << "] " << h.name << ": " << h.detail << '\n';
    return kInfeasible;
  }
  auto& cert = std::get<Certificate>(res);
  cert.theorem = theorem;
  const Json j = certificate_to_json(cert, sys);
  if (!o.out_path.empty()) write_file(o.out_path, j);
  out << j.dump(2) << '\n';
  err << "certified at rho = " << rho << (cert.unique() ? " (unique solution)" : " (free unknowns set to 0)") << '\n';
  for (std::size_t i = 0; i < cert.Q.size(); ++i) err << "  Q" << i + 1 << " = " << to_string(cert.Q[i]) << '\n';
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const AffineSystem sys = load_system(o.system);
  const Certificate cert = certificate_from_json(load_json(o.certificate), sys);
  const VerificationReport rep = verify_certificate(sys, cert);
  bool valid = rep.bound_satisfied;
  if (cert.mode == CertificateMode::kExact) {
    valid = valid && rep.exact_equality;
  } else {
    valid = valid && rep.residual->max_abs <= o.tol * std::max(1.0, rep.residual->max_abs_target);
  }
  Json j = verification_to_json(rep);
  j["mode"] = cert.mode == CertificateMode::kExact ? "exact" : "numeric";
  j["rho"] = cert.rho;
  j["valid"] = valid;
  out << j.dump(2) << '\n';
  err << (valid ? "certificate verified" : "certificate does NOT verify") << " (max deg F^j Q_j = " << rep.max_degree
      << ", rho = " << cert.rho << ")\n";
  return valid ? kOk : kInfeasible;
}

int cmd_minrho(const Options& o, std::ostream& out, std::ostream& err) {
  const AffineSystem sys = load_system(o.system);
  const auto r = minimal_rho(sys, o.max_rho);
  const Theorem t = default_theorem(sys);
  Json j{{"max", o.max_rho}, {"minimal_rho", r ? Json(*r) : Json(nullptr)}};
  try {
    const long bound = rho_for(t, sys.profile()).rho;
    j["bound_theorem"] = to_string(t);
    j["bound_rho"] = bound;
    j["slack"] = r ? Json(bound - *r) : Json(nullptr);
  } catch (const ArgumentError&) {
    j["bound_rho"] = nullptr;
  }
  out << j.dump(2) << '\n';
  if (!r) {
    err << "no certificate with rho <= " << o.max_rho << '\n';
    return kInfeasible;
  }
  err << "minimal rho = " << *r;
  if (j.contains("slack") && !j["slack"].is_null()) err << " (bound " << j["bound_rho"] << ", slack " << j["slack"] << ")";
  err << '\n';
  return kOk;
}

Strategy pick_strategy(const Options& o, int n) {
  if (!o.strategy.empty()) return parse_strategy(o.strategy);
  return n == 1 ? Strategy::kChartGrid : Strategy::kSphereMonteCarlo;
}

QuadConfig quad_config(const Options& o, int n) {
  QuadConfig c;
  c.strategy = pick_strategy(o, n);
  c.samples = o.samples;
  c.seed = o.seed;
  c.eps = o.eps;
  c.eps_sequence = o.eps_sequence;
  c.threads = o.threads;
  c.serial = o.serial;
  c.max_std_error = o.max_std_error;
  c.validate(n);
  return c;
}

int cmd_certify_integral(const Options& o, std::ostream& out, std::ostream& err) {
  const AffineSystem sys = load_system(o.system);
  const QuadConfig cfg = quad_config(o, sys.n());
  const auto cal = CalibrationStore::load(o.calibration).find(sys.n(), cfg.strategy);
  if (!cal) {
    throw CalibrationError("no calibration for n = " + std::to_string(sys.n()) + " and strategy " +
                           to_string(cfg.strategy) + " in " + o.calibration + "; run `calibrate --n " +
                           std::to_string(sys.n()) + " --strategy " + to_string(cfg.strategy) + "` first");
  }
  std::optional<Theorem> theorem;
  const long rho = resolve_rho(sys, o.theorem, o.rho, theorem);

  if (!cfg.eps_sequence.empty()) {
    const auto study = regularized_residual_study(sys, rho, cfg, *cal);
    Json rows = Json::array();
    err << "eps study at rho = " << rho << '\n';
    for (std::size_t k = 0; k < study.size(); ++k) {
      Json row{{"eps", study[k].eps}, {"residual", study[k].residual}, {"max_std_error", study[k].max_std_error}};
      if (k > 0 && study[k].residual > 0 && study[k - 1].residual > 0) {
        row["rate"] = std::log(study[k - 1].residual / study[k].residual) / std::log(study[k - 1].eps / study[k].eps);
      }
      rows.push_back(row);
      err << "  eps = " << study[k].eps << "  residual = " << study[k].residual << '\n';
    }
    bool monotone = true;
    for (std::size_t k = 1; k < study.size(); ++k) monotone = monotone && study[k].residual < study[k - 1].residual;
    out << Json{{"rho", rho}, {"strategy", to_string(cfg.strategy)}, {"samples", cfg.samples}, {"seed", cfg.seed},
                {"calibration_hash", cal->config_hash}, {"eps_study", rows}, {"monotone_decrease", monotone}}
               .dump(2)
        << '\n';
    return kOk;
  }

  IntegralCertificate res = certify_integral(sys, rho, cfg, *cal, !o.no_audit);
  res.cert.theorem = theorem;
  Json j = integral_certificate_to_json(res, sys);
  j["strategy"] = to_string(cfg.strategy);
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["calibration_hash"] = cal->config_hash;
  if (!o.out_path.empty()) write_file(o.out_path, j);
  out << j.dump(2) << '\n';
  err << "integral certificate at rho = " << rho << ", residual " << res.cert.residual->max_abs
      << ", max std error " << res.max_std_error << '\n';
  for (const auto& p : res.proximity) {
    err << "  " << p.monomial << " = " << p.value.real() << (p.value.imag() < 0 ? " - " : " + ")
        << std::abs(p.value.imag()) << "i  (nearest " << p.nearest << ", distance " << p.distance << ")\n";
  }
  if (res.audit.unique && res.audit.max_coeff_diff) {
    err << "  unique exact solution; max coefficient difference " << *res.audit.max_coeff_diff << '\n';
  }
  return kOk;
}

Json dump_point(const Options& o, int n) {
  const std::vector<cd> zeta = parse_point(o.dump_point);
  if (static_cast<int>(zeta.size()) != n + 1) throw ArgumentError("--dump-point needs n + 1 coordinates");
  std::optional<std::vector<cd>> z;
  if (!o.dump_z.empty()) {
    z = parse_point(o.dump_z);
    if (z->size() != zeta.size()) throw ArgumentError("--dump-z needs n + 1 coordinates");
  }
  const Frame frame = Frame::chart(n + 1, 0);
  Json j;
  j["zeta"] = cd_list(zeta);
  j["frame"] = "chart 0";
  j["orientation_factor"] = cd_json(orientation_factor(n));
  if (o.system.empty()) {
    const KernelPoint pt = z ? KernelPoint::make(zeta, std::span<const cd>(*z)) : KernelPoint::make(zeta);
    j["zeta_norm2"] = pt.zeta_norm2;
    j["alpha11"] = form_json(alpha11_eval(pt, frame, 0));
    j["alpha11_power_density"] = cd_json(alpha11_power_density(pt, frame));
    if (z) j["alpha00"] = cd_json(pt.zetabar_dot_z / pt.zeta_norm2);
    return j;
  }
  const AffineSystem sys = load_system(o.system);
  if (sys.n() != n) throw ArgumentError("system dimension does not match --n");
  std::optional<Theorem> theorem;
  const long rho = resolve_rho(sys, o.theorem, o.rho, theorem);
  const HomogeneousSystem hs = homogenize_system(sys, rho);
  const KoszulSystem ks(hs.f.front());
  const KernelPoint pt = z ? KernelPoint::make(ks, zeta, std::span<const cd>(*z)) : KernelPoint::make(ks, zeta);
  j["zeta_norm2"] = pt.zeta_norm2;
  j["alpha11"] = form_json(alpha11_eval(pt, frame, ks.m()));
  j["alpha11_power_density"] = cd_json(alpha11_power_density(pt, frame));
  j["f"] = cd_list(pt.f);
  j["f_norm2"] = pt.f_norm2;
  if (o.eps) j["cutoff"] = cutoff(std::sqrt(pt.f_norm2) / *o.eps);
  j["rho"] = rho;
  try {
    j["sigma"] = cd_list(sigma_eval(ks, pt));
    Json ds = Json::array();
    for (const auto& w : dbar_sigma_eval(ks, pt)) ds.push_back(cd_list(w.anti));
    j["dbar_sigma"] = ds;
    Json u = Json::array();
    for (int k = 1; k <= std::min(ks.m(), n + 1); ++k) u.push_back(form_json(u_eval(ks, pt, frame, k)));
    j["u"] = u;
    const DivisionIntegrand integrand(ks, hs.psi.front(), static_cast<int>(rho) + n, {o.eps, SigmaPath::kGeneral});
    std::vector<cd> dens(integrand.size());
    integrand.eval(pt, frame, dens);
    j["division_density"] = cd_list(dens);
  } catch (const NumericalError& e) {
    j["singular"] = e.what();
  }
  return j;
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n < 1) throw ArgumentError("--n must be >= 1");
  if (!o.dump_point.empty()) {
    out << dump_point(o, o.n).dump(2) << '\n';
    err << "kernel values at the given point\n";
    return kOk;
  }
  const QuadConfig cfg = quad_config(o, o.n);
  CalibrationStore store = CalibrationStore::load(o.calibration);
  const auto existing = store.find(o.n, cfg.strategy);
  if (existing && !o.recalibrate) {
    Json j{{"cached", true},       {"path", o.calibration},         {"n", existing->n},
           {"strategy", to_string(existing->strategy)}, {"samples", existing->samples},
           {"seed", existing->seed}, {"raw", cd_json(existing->raw)}, {"constant", cd_json(existing->constant)},
           {"std_error", existing->std_error}, {"version", existing->version},
           {"config_hash", existing->config_hash}};
    out << j.dump(2) << '\n';
    err << "using stored calibration (pass --recalibrate to refresh)\n";
    return kOk;
  }
  const double tolerance = o.tolerance.value_or(cfg.strategy == Strategy::kChartGrid ? 1e-6 : 1e-3);
  const CalibrationRecord rec = calibrate(o.n, cfg, tolerance);
  store.put(rec);
  store.save(o.calibration);
  Json j{{"cached", false},       {"path", o.calibration},        {"n", rec.n},
         {"strategy", to_string(rec.strategy)}, {"samples", rec.samples},
         {"seed", rec.seed},      {"raw", cd_json(rec.raw)},      {"constant", cd_json(rec.constant)},
         {"std_error", rec.std_error}, {"tolerance", tolerance}, {"version", rec.version},
         {"config_hash", rec.config_hash}};
  out << j.dump(2) << '\n';
  err << std::setprecision(12) << "calibrated n = " << rec.n << " (" << to_string(rec.strategy)
      << "): raw integral " << rec.raw.real() << (rec.raw.imag() < 0 ? " - " : " + ") << std::abs(rec.raw.imag())
      << "i, stored in " << o.calibration << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective polynomial membership: degree bounds, exact and integral certificates"};
  app.require_subcommand(1);
  Options o;

  auto* bounds = app.add_subcommand("bounds", "degree bound report for a system");
  bounds->add_option("--system", o.system, "system JSON file")->required();
  bounds->add_option("--theorem", o.theorem, "ideal, complete_intersection, module or macaulay_noether");
  bounds->add_option("--nu-inf", o.nu_inf, "contact order at infinity as p/q");

  auto* certify = app.add_subcommand("certify", "exact certificate at a bound or a given rho");
  certify->add_option("--system", o.system, "system JSON file")->required();
  auto* ct = certify->add_option("--theorem", o.theorem, "theorem whose bound fixes rho");
  auto* cr = certify->add_option("--rho", o.rho, "degree bound");
  ct->excludes(cr);
  certify->add_option("--out", o.out_path, "also write the certificate to this file");

  auto* integral = app.add_subcommand("certify-integral", "numeric certificate from the integral representation");
  integral->add_option("--system", o.system, "system JSON file")->required();
  auto* it = integral->add_option("--theorem", o.theorem, "theorem whose bound fixes rho");
  auto* ir = integral->add_option("--rho", o.rho, "degree bound");
  it->excludes(ir);
  integral->add_option("--samples", o.samples, "Monte Carlo samples or grid nodes")->required();
  integral->add_option("--seed", o.seed, "random seed")->required();
  auto* ie = integral->add_option("--eps", o.eps, "cutoff radius around the zero set");
  auto* is = integral->add_option("--eps-sequence", o.eps_sequence, "decreasing eps values for a residual study")
                 ->delimiter(',');
  ie->excludes(is);
  integral->add_option("--strategy", o.strategy, "chart-grid, chart-montecarlo or sphere-montecarlo");
  integral->add_option("--calibration", o.calibration, "calibration state file");
  integral->add_option("--max-std-error", o.max_std_error, "largest accepted coefficient error");
  integral->add_option("--threads", o.threads, "OpenMP threads (0 = default)");
  integral->add_flag("--serial", o.serial, "use the single-threaded reference loop");
  integral->add_flag("--no-audit", o.no_audit, "skip the exact uniqueness audit");
  integral->add_option("--out", o.out_path, "also write the report to this file");

  auto* verify = app.add_subcommand("verify", "re-check a certificate file");
  verify->add_option("--system", o.system, "system JSON file")->required();
  verify->add_option("--certificate", o.certificate, "certificate JSON file")->required();
  verify->add_option("--tolerance", o.tol, "numeric certificates: accepted residual relative to max |Phi|");

  auto* minrho = app.add_subcommand("minrho", "smallest feasible rho by exhaustive search");
  minrho->add_option("--system", o.system, "system JSON file")->required();
  minrho->add_option("--max", o.max_rho, "largest rho to try")->required();

  auto* cal = app.add_subcommand("calibrate", "store the orientation constant for (n, strategy)");
  cal->add_option("--n", o.n, "projective dimension")->required();
  cal->add_option("--strategy", o.strategy, "chart-grid, chart-montecarlo or sphere-montecarlo");
  cal->add_option("--samples", o.samples, "Monte Carlo samples or grid nodes");
  cal->add_option("--seed", o.seed, "random seed");
  cal->add_option("--calibration", o.calibration, "calibration state file");
  cal->add_option("--tolerance", o.tolerance, "accepted deviation of |integral| from 1");
  cal->add_flag("--recalibrate", o.recalibrate, "recompute even when a stored record exists");
  cal->add_option("--threads", o.threads, "OpenMP threads (0 = default)");
  cal->add_option("--dump-point", o.dump_point, "print kernel values at zeta (re or re:im, comma separated)");
  cal->add_option("--dump-z", o.dump_z, "with --dump-point: evaluation point z");
  cal->add_option("--system", o.system, "with --dump-point: include generator kernels of this system");
  cal->add_option("--rho", o.rho, "with --dump-point and --system: degree bound");
  cal->add_option("--eps", o.eps, "with --dump-point and --system: cutoff radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    const int code = app.exit(e, help, err);
    return code == 0 ? kOk : kError;
  }

  try {
    if (bounds->parsed()) return cmd_bounds(o, out, err);
    if (certify->parsed()) return cmd_certify(o, out, err);
    if (integral->parsed()) return cmd_certify_integral(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
    if (minrho->parsed()) return cmd_minrho(o, out, err);
    if (cal->parsed()) {
      if (o.dump_point.empty() && o.samples == 0) throw ArgumentError("calibrate needs --samples");
      return cmd_calibrate(o, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace membership::cli
