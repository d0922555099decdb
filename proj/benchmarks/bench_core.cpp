#include <benchmark/benchmark.h>

#include "extkit/catalog.hpp"
#include "extkit/diffkit.hpp"
#include "extkit/extension.hpp"
#include "extkit/integrate.hpp"
#include "extkit/verify.hpp"

namespace {

void BM_JetSquarePolar(benchmark::State& state) {
  const auto inst = extkit::instantiate("square_polar", {}, {.run_gate = false});
  const extkit::PhasePoint x{1.1, 0.4, 0.3, -0.2};
  for (auto _ : state) benchmark::DoNotOptimize(extkit::eval_jet2(inst.system.hamiltonian, x));
}
BENCHMARK(BM_JetSquarePolar);

void BM_ApplyXL2Euler(benchmark::State& state) {
  const auto sys = extkit::instantiate("euler_top").system;
  const auto& m = sys.observables.at("M");
  const extkit::PhasePoint x{0.3, -0.4, 0.8};
  for (auto _ : state) benchmark::DoNotOptimize(extkit::apply_XL2(sys, m, x));
}
BENCHMARK(BM_ApplyXL2Euler);

extkit::Extension quartic_extension(int m, int n) {
  const auto inst = extkit::instantiate("quartic1");
  extkit::ExtensionParams p;
  p.c = 1.0;
  p.c0 = 1.0;
  p.big_c = 1.0;
  p.m = m;
  p.n = n;
  return extkit::Extension::build(inst.system, inst.g_solutions.front(), p);
}

void BM_Characteristic(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto ext = quartic_extension(m, m);
  const extkit::ExtendedState s{1.2, 0.2, extkit::PhasePoint{0.3, 0.4}};
  for (auto _ : state) benchmark::DoNotOptimize(ext.characteristic(s));
}
BENCHMARK(BM_Characteristic)->Arg(1)->Arg(4)->Arg(8);

void BM_Rk4ExtendedStep(benchmark::State& state) {
  const auto flow = extkit::extension_flow(quartic_extension(1, 1));
  const std::vector<double> y0 = {1.2, 0.2, 0.3, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(extkit::rk4(flow, y0, 1e-3, 1e-3));
}
BENCHMARK(BM_Rk4ExtendedStep);

}  // namespace

BENCHMARK_MAIN();
