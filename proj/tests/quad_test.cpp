#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "membership/error.hpp"
#include "membership/quad.hpp"
#include "test_support.hpp"

using namespace membership;
using testing_support::P;
using testing_support::random_point;
using testing_support::random_poly;
using testing_support::z_vars;

namespace {

QuadConfig grid(std::uint64_t samples = 20000) {
  QuadConfig c;
  c.strategy = Strategy::kChartGrid;
  c.samples = samples;
  return c;
}

QuadConfig monte_carlo(Strategy s, std::uint64_t samples, std::uint64_t seed) {
  QuadConfig c;
  c.strategy = s;
  c.samples = samples;
  c.seed = seed;
  return c;
}

const CalibrationRecord& grid_calibration() {
  static const CalibrationRecord rec = calibrate(1, grid(), 1e-6);
  return rec;
}

// |zeta_j|^2/|zeta|^2 against the normalized volume form; by symmetry its
// integral over P^n is 1/(n+1).
cd coordinate_weight(std::span<const cd> zeta, const Frame& frame, std::size_t j) {
  const KernelPoint pt = KernelPoint::make(zeta);
  return alpha11_power_density(pt, frame) * std::norm(zeta[j]) / pt.zeta_norm2;
}

std::vector<std::string> xs() { return {"x"}; }

}  // namespace

TEST_CASE("Gauss-Legendre nodes integrate polynomials exactly") {
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(6, -1.0, 2.0, x, w);
  for (int k = 0; k <= 11; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
    const double exact = (std::pow(2.0, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("strategy names round-trip and bad configurations are rejected") {
  for (Strategy s : {Strategy::kChartGrid, Strategy::kChartMonteCarlo, Strategy::kSphereMonteCarlo}) {
    CHECK(parse_strategy(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_strategy("simpson"), ArgumentError);
  CHECK_THROWS_AS(grid().validate(2), ArgumentError);
  QuadConfig c = grid();
  c.chart = 2;
  CHECK_THROWS_AS(c.validate(1), ArgumentError);
  c = grid();
  c.eps_sequence = {0.1, 0.2};
  CHECK_THROWS_AS(c.validate(1), ArgumentError);
  c.eps_sequence = {0.1, -0.05};
  CHECK_THROWS_AS(c.validate(1), ArgumentError);
  c = grid();
  c.eps = 0.0;
  CHECK_THROWS_AS(c.validate(1), ArgumentError);
  c = grid();
  c.samples = 0;
  CHECK_THROWS_AS(c.validate(1), ArgumentError);
}

TEST_CASE("calibration integral has modulus one") {
  const CalibrationRecord g = grid_calibration();
  CHECK(std::abs(std::abs(g.raw) - 1.0) < 1e-6);
  CHECK(std::abs(g.constant * g.raw - 1.0) < 1e-12);
  CHECK(g.std_error < 1e-6);

  const auto mc1 = calibrate(1, monte_carlo(Strategy::kChartMonteCarlo, 20000, 3), 1e-3);
  CHECK(std::abs(mc1.raw - g.raw) < 1e-3);
  const auto mc2 = calibrate(2, monte_carlo(Strategy::kSphereMonteCarlo, 200000, 5), 1e-3);
  CHECK(std::abs(std::abs(mc2.raw) - 1.0) < 1e-3);
  // the sign of the raw integral is (-1)^n
  CHECK(mc2.raw.real() > 0.0);
  CHECK(g.raw.real() < 0.0);
}

TEST_CASE("volume moments match the symmetric value 1/(n+1)") {
  for (int n : {1, 2}) {
    for (Strategy s : {Strategy::kChartMonteCarlo, Strategy::kSphereMonteCarlo}) {
      const QuadConfig cfg = monte_carlo(s, 400000, 11);
      const cd constant = n % 2 ? cd(-1.0) : cd(1.0);
      for (std::size_t j = 0; j <= static_cast<std::size_t>(n); ++j) {
        const auto est = integrate_Pn(
            n, [&](std::span<const cd> z, const Frame& f) { return coordinate_weight(z, f, j); }, cfg);
        CAPTURE(n);
        CAPTURE(j);
        CHECK(est.std_error > 0.0);
        CHECK(std::abs(constant * est.value - 1.0 / (n + 1)) < 5.0 * est.std_error + 1e-12);
      }
    }
  }
  for (std::size_t j = 0; j < 2; ++j) {
    const auto est = integrate_Pn(
        1, [&](std::span<const cd> z, const Frame& f) { return coordinate_weight(z, f, j); }, grid());
    CHECK(std::abs(-est.value - 0.5) < 1e-9);
  }
}

TEST_CASE("grid is independent of the chart and of the grid pole") {
  const auto density = [](std::span<const cd> z, const Frame& f) {
    const KernelPoint pt = KernelPoint::make(z);
    return alpha11_power_density(pt, f) * std::norm(z[0] + 2.0 * z[1]) / pt.zeta_norm2;
  };
  const cd base = integrate_Pn(1, density, grid()).value;
  QuadConfig c = grid();
  c.chart = 1;
  CHECK(std::abs(integrate_Pn(1, density, c).value - base) < 1e-9);
  c = grid();
  c.grid_center = {cd(0.3, -1.0), cd(2.0, 0.5)};
  CHECK(std::abs(integrate_Pn(1, density, c).value - base) < 1e-9);
  c.eps = 0.01;
  c.grid_breaks = {0.2, 1.7};
  CHECK(std::abs(integrate_Pn(1, density, c).value - base) < 1e-9);
}

TEST_CASE("serial reference and OpenMP kernel agree bit for bit") {
  const Poly psi = P("z0^2 + 3*z0*z1 - I*z1^2", z_vars(1));
  const NumericPoly np(psi);
  const std::vector<cd> z{cd(0.4, 0.1), cd(-0.7, 0.3)};
  for (Strategy s : {Strategy::kChartMonteCarlo, Strategy::kSphereMonteCarlo, Strategy::kChartGrid}) {
    QuadConfig c = s == Strategy::kChartGrid ? grid(5000) : monte_carlo(s, 50000, 99);
    const auto density = [&](std::span<const cd> zeta, const Frame& f) {
      return reproducing_density(np, 3, KernelPoint::make(zeta, z), f);
    };
    c.serial = true;
    const auto a = integrate_Pn(1, density, c);
    c.serial = false;
    c.threads = 4;
    const auto b = integrate_Pn(1, density, c);
    CHECK(a.value.real() == b.value.real());
    CHECK(a.value.imag() == b.value.imag());
    CHECK(a.std_error == b.std_error);
    CHECK(a.samples_used == b.samples_used);
  }
  // different seeds give different estimates
  const auto density = [&](std::span<const cd> zeta, const Frame& f) {
    return reproducing_density(np, 3, KernelPoint::make(zeta, z), f);
  };
  const auto a = integrate_Pn(1, density, monte_carlo(Strategy::kChartMonteCarlo, 10000, 1));
  const auto b = integrate_Pn(1, density, monte_carlo(Strategy::kChartMonteCarlo, 10000, 2));
  CHECK(a.value != b.value);
}

TEST_CASE("rejected points are resampled and excessive rejection aborts") {
  const auto always = [](std::span<const cd>, const Frame&) -> cd { throw NumericalError("singular"); };
  CHECK_THROWS_AS(integrate_Pn(1, always, monte_carlo(Strategy::kChartMonteCarlo, 1000, 1)), NumericalError);
  CHECK_THROWS_AS(integrate_Pn(1, always, grid(2000)), NumericalError);

  // reject roughly one draw in a hundred; the estimate stays consistent
  const auto sometimes = [](std::span<const cd> z, const Frame& f) -> cd {
    if (std::abs(z[1]) < 0.1) return {std::nan(""), 0.0};
    return alpha11_power_density(KernelPoint::make(z), f);
  };
  const auto est = integrate_Pn(1, sometimes, monte_carlo(Strategy::kChartMonteCarlo, 20000, 4));
  CHECK(est.rejected > 0);
  CHECK(est.samples_used == 20000);
  QuadConfig strict = monte_carlo(Strategy::kChartMonteCarlo, 20000, 4);
  strict.max_rejection_fraction = 0.0;
  CHECK_THROWS_AS(integrate_Pn(1, sometimes, strict), NumericalError);
}

TEST_CASE("reproducing formula recovers homogeneous sections") {
  const CalibrationRecord cal = grid_calibration();
  CounterRng rng(2024, 6);
  for (int kappa = 1; kappa <= 3; ++kappa) {
    for (const Exponents& e : monomials_of_degree(2, static_cast<unsigned>(kappa - 1))) {
      const Poly psi = Poly::monomial(z_vars(1), e, GaussRational(1));
      for (int trial = 0; trial < 3; ++trial) {
        const auto z = random_point(rng, 2);
        const cd expected = evaluate(psi, z);
        const cd got = reproduce_section(psi, kappa, z, grid(8000), cal).value;
        CAPTURE(kappa);
        CHECK(std::abs(got - expected) < 1e-8 * std::max(1.0, std::abs(expected)));
      }
    }
  }
  // linearity in psi
  const Poly a = P("z0^2 - 2*z1^2", z_vars(1));
  const Poly b = P("I*z0*z1", z_vars(1));
  const std::vector<cd> z{cd(1.2, -0.4), cd(0.3, 0.9)};
  const cd sum = reproduce_section(a + b, 3, z, grid(8000), cal).value;
  const cd parts = reproduce_section(a, 3, z, grid(8000), cal).value + reproduce_section(b, 3, z, grid(8000), cal).value;
  CHECK(std::abs(sum - parts) < 1e-10);
}

TEST_CASE("reproducing formula on P^2 by Monte Carlo") {
  const QuadConfig cfg = monte_carlo(Strategy::kSphereMonteCarlo, 200000, 17);
  const CalibrationRecord cal = calibrate(2, cfg, 1e-3);
  const Poly psi = P("z0*z1 - 2*z2^2 + I*z0*z2", z_vars(2));
  const std::vector<cd> z{cd(0.5, 0.2), cd(-0.3, 0.8), cd(0.1, -0.6)};
  const auto est = reproduce_section(psi, 4, z, cfg, cal);
  CHECK(std::abs(est.value - evaluate(psi, z)) < 5.0 * est.std_error + 1e-9);
}

TEST_CASE("reproducing formula validates its inputs") {
  const CalibrationRecord cal = grid_calibration();
  const std::vector<cd> z{1.0, 2.0};
  CHECK_THROWS_AS(reproduce_section(P("z0^2 + z1", z_vars(1)), 3, z, grid(), cal), ArgumentError);
  CHECK_THROWS_AS(reproduce_section(P("z0^2", z_vars(1)), 2, z, grid(), cal), ArgumentError);
  CHECK_THROWS_AS(reproduce_section(P("z0", z_vars(1)), 2, std::vector<cd>{1.0}, grid(), cal), ArgumentError);
  CHECK_THROWS_AS(reproduce_section(P("z0", z_vars(1)), 2, z, monte_carlo(Strategy::kChartMonteCarlo, 10, 1), cal),
                  CalibrationError);
}

TEST_CASE("integral certificates reproduce unique exact certificates") {
  const CalibrationRecord cal = grid_calibration();
  {
    const auto sys = AffineSystem::ideal({P("x", xs()), P("x - 1", xs())}, P("1", xs()));
    const auto res = certify_integral(sys, 1, grid(), cal);
    REQUIRE(res.cert.Q_numeric.size() == 2);
    CHECK(std::abs(res.cert.Q_numeric[0](std::vector<cd>{0.0}) - 1.0) < 1e-3);
    CHECK(std::abs(res.cert.Q_numeric[1](std::vector<cd>{0.0}) + 1.0) < 1e-3);
    CHECK(res.audit.exact_feasible);
    CHECK(res.audit.unique);
    CHECK(*res.audit.max_coeff_diff < 1e-6);
    CHECK(res.cert.residual->max_abs < 1e-6);
    CHECK(res.proximity.size() == 2);
    CHECK(res.proximity[0].nearest == "1");
    CHECK(res.proximity[1].nearest == "-1");
  }
  {
    const auto sys = AffineSystem::ideal({P("x^2", xs()), P("x^2 - 2*x + 1", xs())}, P("1", xs()));
    const auto res = certify_integral(sys, 3, grid(), cal);
    const std::vector<cd> at2{2.0};
    CHECK(std::abs(res.cert.Q_numeric[0](at2) - (-1.0)) < 1e-6);
    CHECK(std::abs(res.cert.Q_numeric[1](at2) - 5.0) < 1e-6);
    CHECK(res.audit.unique);
    CHECK(*res.audit.max_coeff_diff < 1e-6);
  }
}

TEST_CASE("integral certificates match the exact solution for a generic target") {
  // the cofactor space at the minimal rho is one-dimensional per degree, so the
  // exact certificate is unique and the integral must land on it
  const CalibrationRecord cal = grid_calibration();
  const auto sys = AffineSystem::ideal({P("x^2 + 1", xs()), P("x - 3", xs())}, P("2*x^2 - I*x + 5", xs()));
  const auto exact = certify_module(sys, 2);
  REQUIRE(std::holds_alternative<Certificate>(exact));
  const auto res = certify_integral(sys, 2, grid(), cal);
  CHECK(res.cert.residual->max_abs < 1e-6);
  if (std::get<Certificate>(exact).unique()) CHECK(*res.audit.max_coeff_diff < 1e-6);
}

TEST_CASE("integral certificate rejects bad requests") {
  const CalibrationRecord cal = grid_calibration();
  const auto sys = AffineSystem::ideal({P("x", xs()), P("x - 1", xs())}, P("1", xs()));
  CHECK_THROWS_AS(certify_integral(sys, 1, monte_carlo(Strategy::kChartMonteCarlo, 100, 1), cal), CalibrationError);
  QuadConfig tight = grid(200);
  tight.max_std_error = 0.0;
  const auto hard = AffineSystem::ideal({P("x^2", xs()), P("x^2 - 2*x + 1", xs())}, P("1", xs()));
  CHECK_THROWS_AS(certify_integral(hard, 3, tight, cal), NumericalError);
}

TEST_CASE("regularized residual decays for members and not for non-members") {
  const CalibrationRecord cal = grid_calibration();
  QuadConfig cfg = grid();
  cfg.eps_sequence = {0.1, 0.05, 0.025, 0.0125, 0.00625};
  const auto member = AffineSystem::ideal({P("x^2", xs()), P("x", xs())}, P("x", xs()));
  const auto mres = regularized_residual_study(member, 2, cfg, cal);
  REQUIRE(mres.size() == 5);
  for (std::size_t k = 1; k < mres.size(); ++k) CHECK(mres[k].residual < mres[k - 1].residual);
  CHECK(mres.front().residual / mres.back().residual >= 5.0);

  const auto non = AffineSystem::ideal({P("x^2", xs()), P("x^3", xs())}, P("1", xs()));
  const auto nres = regularized_residual_study(non, 5, cfg, cal);
  for (const auto& r : nres) CHECK(r.residual > 10.0 * mres.back().residual);
  QuadConfig empty = grid();
  CHECK_THROWS_AS(regularized_residual_study(member, 2, empty, cal), ArgumentError);
}

TEST_CASE("calibration store round-trips and rejects stale records") {
  const auto path = std::filesystem::temp_directory_path() / "membership_quad_test_calibration.json";
  std::filesystem::remove(path);
  CHECK(CalibrationStore::load(path.string()).records().empty());

  CalibrationStore store;
  const CalibrationRecord rec = grid_calibration();
  store.put(rec);
  store.put(rec);
  CHECK(store.records().size() == 1);
  store.save(path.string());
  const auto loaded = CalibrationStore::load(path.string());
  const auto found = loaded.find(1, Strategy::kChartGrid);
  REQUIRE(found.has_value());
  CHECK(found->constant == rec.constant);
  CHECK(found->config_hash == calibration_hash(1, Strategy::kChartGrid, rec.samples, rec.seed));
  CHECK_FALSE(loaded.find(2, Strategy::kChartGrid).has_value());
  CHECK_FALSE(loaded.find(1, Strategy::kChartMonteCarlo).has_value());

  CalibrationRecord stale = rec;
  stale.version = "membership-calibration/0";
  CalibrationStore old;
  old.put(stale);
  CHECK_FALSE(old.find(1, Strategy::kChartGrid).has_value());
  CalibrationRecord tampered = rec;
  tampered.samples += 1;
  CalibrationStore bad;
  bad.put(tampered);
  CHECK_FALSE(bad.find(1, Strategy::kChartGrid).has_value());

  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(CalibrationStore::load(path.string()), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("nearest rational search") {
  CHECK(nearest_rational(0.3333333, 64) == std::pair<long, long>{1, 3});
  CHECK(nearest_rational(-2.0000001, 64) == std::pair<long, long>{-2, 1});
  CHECK(nearest_rational(0.015625, 64) == std::pair<long, long>{1, 64});
  CHECK(nearest_rational(0.7142857, 64) == std::pair<long, long>{5, 7});
}

TEST_CASE("property: grid reproducing formula on random sections") {
  const CalibrationRecord cal = grid_calibration();
  CounterRng rng(77, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const int kappa = 1 + static_cast<int>(rng.next() % 4);
    const Poly psi = random_poly(rng, z_vars(1), static_cast<unsigned>(kappa - 1), 3, true, true);
    if (psi.is_zero()) continue;
    const auto z = random_point(rng, 2);
    const cd expected = evaluate(psi, z);
    const cd got = reproduce_section(psi, kappa, z, grid(8000), cal).value;
    CHECK(std::abs(got - expected) < 1e-7 * std::max(1.0, std::abs(expected)));
  }
}
