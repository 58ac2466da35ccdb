#include "membership/quad.hpp"

#include <gsl/gsl_integration.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "membership/error.hpp"
#include "membership/rng.hpp"

namespace membership {

namespace {

constexpr std::uint64_t kBlock = 4096;
constexpr unsigned kMaxAttempts = 64;

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

bool all_finite(std::span<const cd> v) {
  for (const cd& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

struct BlockSums {
  std::vector<cd> sum;
  std::vector<double> sumsq;
  std::uint64_t used = 0;
  std::uint64_t rejected = 0;
  std::exception_ptr error;
};

// Runs body(b) for every block either serially or with OpenMP; results are
// stored per block so the reduction order never depends on scheduling.
template <class Body>
void for_blocks(std::size_t nblocks, const QuadConfig& cfg, Body&& body) {
  if (cfg.serial) {
    for (std::size_t b = 0; b < nblocks; ++b) body(b);
    return;
  }
  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t b = 0; b < nblocks; ++b) body(b);
}

std::vector<IntegralEstimate> reduce(const std::vector<BlockSums>& blocks, std::size_t outputs, bool monte_carlo,
                                     const QuadConfig& cfg) {
  std::vector<cd> sum(outputs, 0.0);
  std::vector<double> sumsq(outputs, 0.0);
  std::uint64_t used = 0;
  std::uint64_t rejected = 0;
  for (const auto& b : blocks) {
    if (b.error) std::rethrow_exception(b.error);
    for (std::size_t k = 0; k < outputs; ++k) {
      sum[k] += b.sum[k];
      sumsq[k] += b.sumsq[k];
    }
    used += b.used;
    rejected += b.rejected;
  }
  const double limit = std::max(16.0, cfg.max_rejection_fraction * static_cast<double>(used + rejected));
  if (static_cast<double>(rejected) > limit) {
    throw NumericalError("quadrature rejected " + std::to_string(rejected) + " sample points");
  }
  std::vector<IntegralEstimate> out(outputs);
  for (std::size_t k = 0; k < outputs; ++k) {
    out[k].samples_used = used;
    out[k].rejected = rejected;
    if (monte_carlo) {
      const double N = static_cast<double>(used);
      out[k].value = sum[k] / N;
      const double var = std::max(0.0, sumsq[k] / N - std::norm(out[k].value));
      out[k].std_error = std::sqrt(var / N);
    } else {
      out[k].value = sum[k];
    }
  }
  return out;
}

// ---------------------------------------------------------------- Monte Carlo

std::vector<IntegralEstimate> integrate_mc(int n, std::size_t outputs, const DensityFn& density,
                                           const QuadConfig& cfg) {
  const int N = n + 1;
  std::vector<Frame> frames;
  for (int c = 0; c < N; ++c) frames.push_back(Frame::chart(N, c));
  const double norm_const = factorial(n) / std::pow(std::numbers::pi, n);
  const std::size_t nblocks = static_cast<std::size_t>((cfg.samples + kBlock - 1) / kBlock);
  std::vector<BlockSums> blocks(nblocks);

  for_blocks(nblocks, cfg, [&](std::size_t b) {
    BlockSums& out = blocks[b];
    out.sum.assign(outputs, 0.0);
    out.sumsq.assign(outputs, 0.0);
    std::vector<cd> buf(outputs);
    std::vector<cd> u(static_cast<std::size_t>(N));
    const std::uint64_t begin = b * kBlock;
    const std::uint64_t end = std::min<std::uint64_t>(cfg.samples, begin + kBlock);
    try {
      for (std::uint64_t s = begin; s < end; ++s) {
        bool accepted = false;
        for (unsigned attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
          CounterRng rng(cfg.seed, (s << 6) | attempt);
          double len2 = 0.0;
          for (auto& c : u) {
            c = cd(rng.normal(), rng.normal());
            len2 += std::norm(c);
          }
          int chart = cfg.chart;
          if (cfg.strategy == Strategy::kSphereMonteCarlo) {
            chart = 0;
            for (int c = 1; c < N; ++c) {
              if (std::abs(u[static_cast<std::size_t>(c)]) > std::abs(u[static_cast<std::size_t>(chart)])) chart = c;
            }
          }
          const cd pivot = u[static_cast<std::size_t>(chart)];
          if (std::abs(pivot) < 1e-12 * std::sqrt(len2)) {
            ++out.rejected;
            continue;
          }
          std::vector<cd> zeta(u.size());
          double zeta2 = 0.0;
          for (std::size_t k = 0; k < u.size(); ++k) {
            zeta[k] = u[k] / pivot;
            zeta2 += std::norm(zeta[k]);
          }
          try {
            density(zeta, frames[static_cast<std::size_t>(chart)], buf);
          } catch (const NumericalError&) {
            ++out.rejected;
            continue;
          }
          if (!all_finite(buf)) {
            ++out.rejected;
            continue;
          }
          // Fubini-Study density in chart coordinates: n! / (pi^n |zeta|^(2(n+1)))
          const double p = norm_const / std::pow(zeta2, N);
          for (std::size_t k = 0; k < outputs; ++k) {
            const cd w = buf[k] / p;
            out.sum[k] += w;
            out.sumsq[k] += std::norm(w);
          }
          ++out.used;
          accepted = true;
        }
        if (!accepted) throw NumericalError("sample " + std::to_string(s) + " rejected on every attempt");
      }
    } catch (...) {
      out.error = std::current_exception();
    }
  });
  return reduce(blocks, outputs, true, cfg);
}

// ---------------------------------------------------------------- grid (n = 1)

struct GridLayout {
  std::vector<double> theta;
  std::vector<double> weight;
  int nphi = 0;
};

GridLayout grid_layout(const std::vector<double>& edges, int per_panel, int nphi) {
  GridLayout g;
  g.nphi = nphi;
  std::vector<double> x;
  std::vector<double> w;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    gauss_legendre(per_panel, edges[p], edges[p + 1], x, w);
    g.theta.insert(g.theta.end(), x.begin(), x.end());
    g.weight.insert(g.weight.end(), w.begin(), w.end());
  }
  return g;
}

std::vector<double> panel_edges(const QuadConfig& cfg) {
  std::vector<double> edges{0.0, std::numbers::pi};
  if (cfg.eps) {
    // geometric grading toward the pole, down to well inside the cutoff disc
    const double stop = std::min(0.5, *cfg.eps) / 64.0;
    for (double t = std::numbers::pi / 2; t > stop; t /= 2) edges.push_back(t);
  }
  for (double b : cfg.grid_breaks) {
    if (b > 0.0 && b < std::numbers::pi) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(), [](double a, double b) { return b - a < 1e-14; }), edges.end());
  return edges;
}

std::vector<IntegralEstimate> run_grid(const GridLayout& g, std::size_t outputs, const DensityFn& density,
                                       const std::vector<cd>& u, const std::vector<cd>& uperp, const QuadConfig& cfg) {
  const Frame frame = Frame::from_columns(2, {uperp});
  const std::size_t nblocks = g.theta.size();
  std::vector<BlockSums> rows(nblocks);
  for_blocks(nblocks, cfg, [&](std::size_t i) {
    BlockSums& out = rows[i];
    out.sum.assign(outputs, 0.0);
    out.sumsq.assign(outputs, 0.0);
    std::vector<cd> buf(outputs);
    const double theta = g.theta[i];
    const double r = std::tan(theta / 2.0);
    // area element of the chart t = tan(theta/2) e^(i phi)
    const double jac = std::sin(theta) / ((1.0 + std::cos(theta)) * (1.0 + std::cos(theta)));
    const double wrow = g.weight[i] * jac * 2.0 * std::numbers::pi / g.nphi;
    try {
      for (int j = 0; j < g.nphi; ++j) {
        const cd t = std::polar(r, 2.0 * std::numbers::pi * j / g.nphi);
        const std::vector<cd> zeta{u[0] + t * uperp[0], u[1] + t * uperp[1]};
        try {
          density(zeta, frame, buf);
        } catch (const NumericalError&) {
          ++out.rejected;
          continue;
        }
        if (!all_finite(buf)) {
          ++out.rejected;
          continue;
        }
        for (std::size_t k = 0; k < outputs; ++k) out.sum[k] += buf[k] * wrow;
        ++out.used;
      }
    } catch (...) {
      out.error = std::current_exception();
    }
  });
  return reduce(rows, outputs, false, cfg);
}

std::vector<IntegralEstimate> integrate_grid(int n, std::size_t outputs, const DensityFn& density,
                                             const QuadConfig& cfg) {
  if (n != 1) throw ArgumentError("chart-grid integrates over P^1 only");
  std::vector<cd> u(2, 0.0);
  if (cfg.grid_center.empty()) {
    u[static_cast<std::size_t>(cfg.chart)] = 1.0;
  } else {
    const double len = std::sqrt(std::norm(cfg.grid_center[0]) + std::norm(cfg.grid_center[1]));
    if (!(len > 0.0)) throw ArgumentError("grid center must be nonzero");
    u = {cfg.grid_center[0] / len, cfg.grid_center[1] / len};
  }
  const std::vector<cd> uperp{-std::conj(u[1]), std::conj(u[0])};

  const std::vector<double> edges = panel_edges(cfg);
  const int panels = static_cast<int>(edges.size()) - 1;
  const int ntheta = std::max(8, static_cast<int>(std::lround(std::sqrt(static_cast<double>(cfg.samples) / 2.0))));
  const int per_panel = std::max(8, ntheta / panels);
  const int nphi = 2 * std::max(8, ntheta);

  auto fine = run_grid(grid_layout(edges, per_panel, nphi), outputs, density, u, uperp, cfg);
  const auto coarse = run_grid(grid_layout(edges, std::max(4, per_panel / 2), nphi / 2), outputs, density, u, uperp, cfg);
  for (std::size_t k = 0; k < outputs; ++k) fine[k].std_error = std::abs(fine[k].value - coarse[k].value);
  return fine;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

nlohmann::json complex_json(cd c) { return nlohmann::json::array({c.real(), c.imag()}); }
cd complex_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kChartGrid: return "chart-grid";
    case Strategy::kChartMonteCarlo: return "chart-montecarlo";
    case Strategy::kSphereMonteCarlo: return "sphere-montecarlo";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "chart-grid" || name == "grid") return Strategy::kChartGrid;
  if (name == "chart-montecarlo" || name == "mc") return Strategy::kChartMonteCarlo;
  if (name == "sphere-montecarlo") return Strategy::kSphereMonteCarlo;
  throw ArgumentError("unknown quadrature strategy '" + name + "'");
}

void QuadConfig::validate(int n) const {
  if (n < 1) throw ArgumentError("quadrature needs n >= 1");
  if (samples < 1) throw ArgumentError("samples must be >= 1");
  if (samples > (std::uint64_t{1} << 56)) throw ArgumentError("samples too large");
  if (chart < 0 || chart > n) throw ArgumentError("chart index out of range");
  if (strategy == Strategy::kChartGrid && n != 1) throw ArgumentError("chart-grid integrates over P^1 only");
  if (eps && !(*eps > 0.0)) throw ArgumentError("eps must be positive");
  for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
    if (!(eps_sequence[i] > 0.0)) throw ArgumentError("eps values must be positive");
    if (i > 0 && !(eps_sequence[i] < eps_sequence[i - 1])) {
      throw ArgumentError("eps sequence must be strictly decreasing");
    }
  }
  if (!grid_center.empty() && grid_center.size() != 2) throw ArgumentError("grid center must be a point of P^1");
}

void gauss_legendre(int nodes, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(nodes));
  if (!table) throw NumericalError("Gauss-Legendre table allocation failed");
  x.resize(static_cast<std::size_t>(nodes));
  w.resize(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &x[static_cast<std::size_t>(i)],
                                  &w[static_cast<std::size_t>(i)], table);
  }
  gsl_integration_glfixed_table_free(table);
}

std::vector<IntegralEstimate> integrate_Pn(int n, std::size_t outputs, const DensityFn& density,
                                           const QuadConfig& cfg) {
  cfg.validate(n);
  if (cfg.strategy == Strategy::kChartGrid) return integrate_grid(n, outputs, density, cfg);
  return integrate_mc(n, outputs, density, cfg);
}

IntegralEstimate integrate_Pn(int n, const std::function<cd(std::span<const cd>, const Frame&)>& density,
                              const QuadConfig& cfg) {
  const DensityFn wrapped = [&](std::span<const cd> zeta, const Frame& frame, std::span<cd> out) {
    out[0] = density(zeta, frame);
  };
  return integrate_Pn(n, 1, wrapped, cfg).front();
}

// ---------------------------------------------------------------- calibration

std::string calibration_hash(int n, Strategy s, std::uint64_t samples, std::uint64_t seed) {
  std::ostringstream os;
  os << CalibrationStore::kVersion << '|' << n << '|' << to_string(s) << '|' << samples << '|' << seed;
  std::ostringstream hex;
  hex << std::hex << fnv1a(os.str());
  return hex.str();
}

CalibrationRecord calibrate(int n, const QuadConfig& cfg, double tolerance) {
  const auto est = integrate_Pn(
      n, [](std::span<const cd> zeta, const Frame& frame) { return alpha11_power_density(KernelPoint::make(zeta), frame); },
      cfg);
  CalibrationRecord rec;
  rec.n = n;
  rec.strategy = cfg.strategy;
  rec.samples = cfg.samples;
  rec.seed = cfg.seed;
  rec.raw = est.value;
  rec.std_error = est.std_error;
  rec.version = CalibrationStore::kVersion;
  rec.config_hash = calibration_hash(n, cfg.strategy, cfg.samples, cfg.seed);
  const double dev = std::abs(std::abs(est.value) - 1.0);
  if (!(dev <= tolerance)) {
    std::ostringstream os;
    os << "calibration integral has modulus " << std::abs(est.value) << ", expected 1 within " << tolerance;
    throw NumericalError(os.str());
  }
  rec.constant = 1.0 / est.value;
  return rec;
}

CalibrationStore CalibrationStore::load(const std::string& path) {
  CalibrationStore store;
  std::ifstream in(path);
  if (!in) return store;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("calibration file " + path + ": " + e.what());
  }
  if (!j.contains("records")) return store;
  for (const auto& r : j.at("records")) {
    CalibrationRecord rec;
    rec.n = r.at("n").get<int>();
    rec.strategy = parse_strategy(r.at("strategy").get<std::string>());
    rec.samples = r.at("samples").get<std::uint64_t>();
    rec.seed = r.at("seed").get<std::uint64_t>();
    rec.raw = complex_from(r.at("raw"));
    rec.std_error = r.at("std_error").get<double>();
    rec.constant = complex_from(r.at("constant"));
    rec.version = r.value("version", std::string{});
    rec.config_hash = r.value("config_hash", std::string{});
    store.records_.push_back(rec);
  }
  return store;
}

void CalibrationStore::save(const std::string& path) const {
  nlohmann::json j;
  j["version"] = kVersion;
  j["records"] = nlohmann::json::array();
  for (const auto& r : records_) {
    j["records"].push_back({{"n", r.n},
                            {"strategy", to_string(r.strategy)},
                            {"samples", r.samples},
                            {"seed", r.seed},
                            {"raw", complex_json(r.raw)},
                            {"std_error", r.std_error},
                            {"constant", complex_json(r.constant)},
                            {"version", r.version},
                            {"config_hash", r.config_hash}});
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write calibration file " + path);
  out << j.dump(2) << '\n';
}

std::optional<CalibrationRecord> CalibrationStore::find(int n, Strategy s) const {
  for (const auto& r : records_) {
    if (r.n == n && r.strategy == s && r.version == kVersion &&
        r.config_hash == calibration_hash(r.n, r.strategy, r.samples, r.seed)) {
      return r;
    }
  }
  return std::nullopt;
}

void CalibrationStore::put(const CalibrationRecord& r) {
  std::erase_if(records_, [&](const CalibrationRecord& o) { return o.n == r.n && o.strategy == r.strategy; });
  records_.push_back(r);
}

// ---------------------------------------------------------------- reproducing formula

namespace {

void require_calibration(const CalibrationRecord& cal, int n, const QuadConfig& cfg) {
  if (cal.n != n || cal.strategy != cfg.strategy || cal.version != CalibrationStore::kVersion) {
    throw CalibrationError("no calibration for n = " + std::to_string(n) + ", strategy " + to_string(cfg.strategy) +
                           "; run calibrate first");
  }
}

}  // namespace

IntegralEstimate reproduce_section(const Poly& psi, int kappa, std::span<const cd> z, const QuadConfig& cfg,
                                   const CalibrationRecord& cal) {
  const int n = static_cast<int>(psi.nvars()) - 1;
  if (static_cast<int>(z.size()) != n + 1) throw ArgumentError("point z has the wrong dimension");
  if (!psi.is_homogeneous() || (!psi.is_zero() && psi.degree() != kappa - n)) {
    throw ArgumentError("psi must be homogeneous of degree kappa - n");
  }
  require_calibration(cal, n, cfg);
  const NumericPoly np(psi);
  const std::vector<cd> zz(z.begin(), z.end());
  auto est = integrate_Pn(
      n,
      [&](std::span<const cd> zeta, const Frame& frame) {
        return reproducing_density(np, kappa, KernelPoint::make(zeta, std::span<const cd>(zz)), frame);
      },
      cfg);
  est.value *= cal.constant;
  est.std_error *= std::abs(cal.constant);
  return est;
}

// ---------------------------------------------------------------- division certificate

std::pair<long, long> nearest_rational(double x, long max_den) {
  std::pair<long, long> best{std::lround(x), 1};
  double best_err = std::abs(x - static_cast<double>(best.first));
  for (long q = 2; q <= max_den; ++q) {
    const long p = std::lround(x * static_cast<double>(q));
    const double err = std::abs(x - static_cast<double>(p) / static_cast<double>(q));
    if (err < best_err - 1e-15) {
      best = {p, q};
      best_err = err;
    }
  }
  return best;
}

namespace {

std::string rational_text(std::pair<long, long> r) {
  return r.second == 1 ? std::to_string(r.first) : std::to_string(r.first) + "/" + std::to_string(r.second);
}

std::string monomial_text(const std::vector<std::string>& vars, const Exponents& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += vars[i];
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

// Theta values along the reference ray where |f|_{E*} crosses eps and 2 eps.
std::vector<double> cutoff_breaks(const KoszulSystem& sys, const QuadConfig& cfg, double eps) {
  std::vector<cd> u(2, 0.0);
  if (cfg.grid_center.empty()) {
    u[static_cast<std::size_t>(cfg.chart)] = 1.0;
  } else {
    const double len = std::sqrt(std::norm(cfg.grid_center[0]) + std::norm(cfg.grid_center[1]));
    u = {cfg.grid_center[0] / len, cfg.grid_center[1] / len};
  }
  const std::vector<cd> uperp{-std::conj(u[1]), std::conj(u[0])};
  auto level = [&](double theta) {
    const double r = std::tan(theta / 2.0);
    const std::vector<cd> zeta{u[0] + r * uperp[0], u[1] + r * uperp[1]};
    return std::sqrt(KernelPoint::make(sys, zeta).f_norm2);
  };
  std::vector<double> out;
  for (double target : {eps, 2.0 * eps}) {
    // log-spaced scan from the pole, then bisection on each sign change
    double prev_t = 1e-12;
    double prev = level(prev_t) - target;
    for (int i = 1; i <= 4000; ++i) {
      const double t = 1e-12 * std::pow((std::numbers::pi - 1e-9) / 1e-12, i / 4000.0);
      const double cur = level(t) - target;
      if ((prev < 0) != (cur < 0)) {
        double lo = prev_t;
        double hi = t;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          if ((level(mid) - target < 0) == (prev < 0)) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        out.push_back(0.5 * (lo + hi));
      }
      prev_t = t;
      prev = cur;
    }
  }
  return out;
}

}  // namespace

IntegralCertificate certify_integral(const AffineSystem& sys, long rho, const QuadConfig& cfg,
                                     const CalibrationRecord& cal, bool audit) {
  sys.validate();
  if (sys.r() != 1) throw ArgumentError("the integral representation is implemented for ideals (one row)");
  const SystemProfile profile = sys.profile();
  if (!check_global_solvability(rho, profile)) {
    throw ArgumentError("rho = " + std::to_string(rho) +
                        " violates global solvability: m <= n or rho - (d_1 + ... + d_{n+1}) >= -n");
  }
  const int n = sys.n();
  cfg.validate(n);
  require_calibration(cal, n, cfg);

  const HomogeneousSystem hs = homogenize_system(sys, rho);
  const KoszulSystem ks(hs.f.front());
  const int kappa = static_cast<int>(rho) + n;
  const DivisionIntegrand integrand(ks, hs.psi.front(), kappa, {cfg.eps, SigmaPath::kGeneral});

  QuadConfig run = cfg;
  if (cfg.strategy == Strategy::kChartGrid && cfg.eps) {
    for (double b : cutoff_breaks(ks, cfg, *cfg.eps)) run.grid_breaks.push_back(b);
  }
  const DensityFn density = [&](std::span<const cd> zeta, const Frame& frame, std::span<cd> out) {
    integrand.eval(KernelPoint::make(ks, zeta), frame, out);
  };
  auto est = integrate_Pn(n, integrand.size(), density, run);

  IntegralCertificate res;
  res.eps = cfg.eps;
  res.homogeneous_vars = hs.vars;
  res.cert.mode = CertificateMode::kNumeric;
  res.cert.rho = rho;
  for (int i = 0; i < sys.m(); ++i) {
    res.monomials.push_back(integrand.monomials(i));
    ComplexPoly Q;
    Q.vars = sys.vars;
    std::vector<IntegralEstimate> coeffs;
    for (std::size_t s = 0; s < integrand.monomials(i).size(); ++s) {
      IntegralEstimate e = est[integrand.offset(i) + s];
      e.value *= cal.constant;
      e.std_error *= std::abs(cal.constant);
      res.max_std_error = std::max(res.max_std_error, e.std_error);
      const Exponents& hom = integrand.monomials(i)[s];
      const Exponents affine(hom.begin() + 1, hom.end());
      Q.terms[affine] += e.value;

      const auto re = nearest_rational(e.value.real(), 64);
      const auto im = nearest_rational(e.value.imag(), 64);
      const cd near(static_cast<double>(re.first) / static_cast<double>(re.second),
                    static_cast<double>(im.first) / static_cast<double>(im.second));
      std::string text = rational_text(re);
      if (im.first != 0) text += (im.first > 0 ? "+" : "") + rational_text(im) + " i";
      res.proximity.push_back({"q" + std::to_string(i + 1) + ":" + monomial_text(hs.vars, hom), e.value, text,
                               std::abs(e.value - near)});
      coeffs.push_back(e);
    }
    res.coefficients.push_back(std::move(coeffs));
    res.cert.Q_numeric.push_back(std::move(Q));
  }
  if (res.max_std_error > cfg.max_std_error) {
    std::ostringstream os;
    os << "quadrature did not converge: largest coefficient error " << res.max_std_error << " exceeds "
       << cfg.max_std_error;
    throw NumericalError(os.str());
  }
  res.cert.residual = numeric_residual(sys, res.cert.Q_numeric, 20240611, 20);

  if (audit) {
    const CertifyResult exact = certify_module(sys, rho);
    if (const auto* c = std::get_if<Certificate>(&exact)) {
      res.audit.exact_feasible = true;
      res.audit.unique = c->unique();
      res.audit.unknowns = c->unknowns;
      res.audit.rank = c->rank;
      if (c->unique()) {
        double diff = 0.0;
        for (std::size_t i = 0; i < c->Q.size(); ++i) {
          const Poly q = c->Q[i].embed(union_vars(sys.vars, c->Q[i].vars()));
          auto numeric = res.cert.Q_numeric[i].terms;
          for (const auto& [e, v] : q.terms()) numeric[e] -= v.to_complex();
          for (const auto& [e, v] : numeric) diff = std::max(diff, std::abs(v));
        }
        res.audit.max_coeff_diff = diff;
      }
    } else {
      const auto& inf = std::get<Infeasible>(exact);
      res.audit.unknowns = inf.unknowns;
      res.audit.rank = inf.rank;
    }
  }
  return res;
}

std::vector<EpsResidual> regularized_residual_study(const AffineSystem& sys, long rho, const QuadConfig& cfg,
                                                    const CalibrationRecord& cal) {
  if (cfg.eps_sequence.empty()) throw ArgumentError("residual study needs an eps sequence");
  cfg.validate(sys.n());
  std::vector<EpsResidual> out;
  for (double eps : cfg.eps_sequence) {
    QuadConfig run = cfg;
    run.eps = eps;
    run.eps_sequence.clear();
    run.max_std_error = std::numeric_limits<double>::infinity();
    const IntegralCertificate c = certify_integral(sys, rho, run, cal, false);
    out.push_back({eps, c.cert.residual->max_abs, c.max_std_error});
  }
  return out;
}

}  // namespace membership
