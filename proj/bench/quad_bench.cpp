// Serial reference loop against the OpenMP kernel on the same quadratures.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "membership/certsolver.hpp"
#include "membership/projkernel.hpp"
#include "membership/quad.hpp"

using namespace membership;

namespace {

Poly var(const std::vector<std::string>& vars, const std::string& name) { return Poly::variable(vars, name); }

// Division density of (x^2 + y^2 - 1, x - y, y^3) over P^2 at rho 4.
struct DivisionCase {
  HomogeneousSystem hs;
  KoszulSystem ks;
  DivisionIntegrand integrand;

  static HomogeneousSystem build() {
    const std::vector<std::string> xy{"x", "y"};
    const Poly x = var(xy, "x");
    const Poly y = var(xy, "y");
    const AffineSystem sys =
        AffineSystem::ideal({x * x + y * y - Poly::constant(xy, 1), x - y, y * y * y}, Poly::constant(xy, 1));
    return homogenize_system(sys, 4);
  }

  DivisionCase() : hs(build()), ks(hs.f.front()), integrand(ks, hs.psi.front(), 6, {0.05, SigmaPath::kGeneral}) {}
};

void run_division(benchmark::State& state, bool serial) {
  static const DivisionCase c;
  QuadConfig cfg;
  cfg.strategy = Strategy::kSphereMonteCarlo;
  cfg.samples = static_cast<std::uint64_t>(state.range(0));
  cfg.seed = 1;
  cfg.serial = serial;
  const DensityFn density = [&](std::span<const cd> zeta, const Frame& frame, std::span<cd> out) {
    c.integrand.eval(KernelPoint::make(c.ks, zeta), frame, out);
  };
  for (auto _ : state) benchmark::DoNotOptimize(integrate_Pn(2, c.integrand.size(), density, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = serial ? 1 : omp_get_max_threads();
}

void run_reproducing(benchmark::State& state, bool serial) {
  const Poly psi = var(std::vector<std::string>{"z0", "z1"}, "z0") * var(std::vector<std::string>{"z0", "z1"}, "z1");
  const NumericPoly np(psi);
  const std::vector<cd> z{cd(0.3, 0.2), cd(-1.1, 0.4)};
  QuadConfig cfg;
  cfg.strategy = Strategy::kChartGrid;
  cfg.samples = static_cast<std::uint64_t>(state.range(0));
  cfg.serial = serial;
  const auto density = [&](std::span<const cd> zeta, const Frame& frame) {
    return reproducing_density(np, 3, KernelPoint::make(zeta, z), frame);
  };
  for (auto _ : state) benchmark::DoNotOptimize(integrate_Pn(1, density, cfg));
  state.counters["threads"] = serial ? 1 : omp_get_max_threads();
}

void BM_DivisionSerial(benchmark::State& s) { run_division(s, true); }
void BM_DivisionOpenMP(benchmark::State& s) { run_division(s, false); }
void BM_ReproducingSerial(benchmark::State& s) { run_reproducing(s, true); }
void BM_ReproducingOpenMP(benchmark::State& s) { run_reproducing(s, false); }

}  // namespace

BENCHMARK(BM_DivisionSerial)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DivisionOpenMP)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReproducingSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReproducingOpenMP)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
