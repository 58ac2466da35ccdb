#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "membership/certsolver.hpp"
#include "membership/projkernel.hpp"

namespace membership {

enum class Strategy { kChartGrid, kChartMonteCarlo, kSphereMonteCarlo };

std::string to_string(Strategy s);
/// "chart-grid", "chart-montecarlo" or "sphere-montecarlo".
Strategy parse_strategy(const std::string& name);

struct QuadConfig {
  Strategy strategy = Strategy::kChartMonteCarlo;
  /// Monte Carlo: number of samples. Grid: approximate number of nodes.
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::optional<double> eps;
  std::vector<double> eps_sequence;
  /// Affine chart zeta_chart = 1 used by chart strategies.
  int chart = 0;
  /// Grid only: point of P^1 placed at the grid pole t = 0 (default the
  /// chart origin). The grid is graded toward this point when eps is set.
  std::vector<cd> grid_center;
  /// Grid only: extra polar-angle panel boundaries in (0, pi).
  std::vector<double> grid_breaks;
  /// OpenMP threads; 0 keeps the runtime default.
  int threads = 0;
  /// Run the single-threaded reference loop instead of the OpenMP one.
  bool serial = false;
  /// Abort when more than this fraction of samples is rejected.
  double max_rejection_fraction = 0.01;
  /// certify_integral: reject estimates whose error exceeds this.
  double max_std_error = 1e-2;

  void validate(int n) const;
};

struct IntegralEstimate {
  cd value = 0.0;
  /// Monte Carlo standard error, or grid refinement delta.
  double std_error = 0.0;
  std::uint64_t samples_used = 0;
  std::uint64_t rejected = 0;
};

/// Vector-valued density: zeta is a homogeneous point, `frame` the chart
/// coordinates t in which `out` must hold Lebesgue densities. Throwing
/// NumericalError or returning a non-finite value rejects the point.
using DensityFn = std::function<void(std::span<const cd> zeta, const Frame& frame, std::span<cd> out)>;

std::vector<IntegralEstimate> integrate_Pn(int n, std::size_t outputs, const DensityFn& density,
                                           const QuadConfig& cfg);
IntegralEstimate integrate_Pn(int n, const std::function<cd(std::span<const cd>, const Frame&)>& density,
                              const QuadConfig& cfg);

/// Gauss-Legendre rule on [a, b].
void gauss_legendre(int nodes, double a, double b, std::vector<double>& x, std::vector<double>& w);

// ---------------------------------------------------------------- calibration

struct CalibrationRecord {
  int n = 1;
  Strategy strategy = Strategy::kChartGrid;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  cd raw = 0.0;        ///< standard-orientation integral of alpha_{1,1}^n
  double std_error = 0.0;
  cd constant = 1.0;   ///< multiplier making the integral 1
  std::string version;
  std::string config_hash;
};

/// Integrates alpha_{1,1}^n; throws NumericalError when |raw| is not 1
/// within `tolerance`.
CalibrationRecord calibrate(int n, const QuadConfig& cfg, double tolerance);

/// Version-stamped JSON file of calibration records keyed by (n, strategy).
class CalibrationStore {
 public:
  static constexpr const char* kVersion = "membership-calibration/1";

  static CalibrationStore load(const std::string& path);  ///< missing file = empty store
  void save(const std::string& path) const;

  /// Records written by another version are treated as absent.
  std::optional<CalibrationRecord> find(int n, Strategy s) const;
  void put(const CalibrationRecord& r);
  const std::vector<CalibrationRecord>& records() const { return records_; }

 private:
  std::vector<CalibrationRecord> records_;
};

std::string calibration_hash(int n, Strategy s, std::uint64_t samples, std::uint64_t seed);

// ---------------------------------------------------------------- reproducing and division

/// Integral of (alpha^kappa)_{n,n} psi at z; approximates psi(z).
IntegralEstimate reproduce_section(const Poly& psi, int kappa, std::span<const cd> z, const QuadConfig& cfg,
                                   const CalibrationRecord& cal);

struct RationalProximity {
  std::string monomial;
  cd value;
  std::string nearest;  ///< nearest Gaussian rational with denominators <= 64
  double distance = 0.0;
};

struct UniquenessAudit {
  bool exact_feasible = false;
  bool unique = false;
  std::size_t unknowns = 0;
  std::size_t rank = 0;
  std::optional<double> max_coeff_diff;  ///< against the exact certificate, when unique
};

struct IntegralCertificate {
  Certificate cert;  ///< numeric mode, Q_numeric and residual filled
  std::vector<std::vector<IntegralEstimate>> coefficients;  ///< [generator][monomial of q_i]
  std::vector<std::vector<Exponents>> monomials;            ///< homogeneous monomials of q_i
  std::vector<std::string> homogeneous_vars;
  std::optional<double> eps;
  double max_std_error = 0.0;
  std::vector<RationalProximity> proximity;
  UniquenessAudit audit;
};

/// Numeric cofactors from the integral representation at the given rho.
IntegralCertificate certify_integral(const AffineSystem& sys, long rho, const QuadConfig& cfg,
                                     const CalibrationRecord& cal, bool audit = true);

struct EpsResidual {
  double eps = 0.0;
  double residual = 0.0;
  double max_std_error = 0.0;
};

std::vector<EpsResidual> regularized_residual_study(const AffineSystem& sys, long rho, const QuadConfig& cfg,
                                                    const CalibrationRecord& cal);

/// Nearest p/q (q <= max_den) to x.
std::pair<long, long> nearest_rational(double x, long max_den);

}  // namespace membership
