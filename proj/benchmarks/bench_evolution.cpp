#include <benchmark/benchmark.h>

#include <random>

#include "metricbundle/evolution.hpp"
#include "metricbundle/representations.hpp"
#include "metricbundle/verify.hpp"

using namespace metricbundle;

namespace {

// Random Hermitian part plus a small anti-Hermitian perturbation.
CMatrix random_generator(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  CMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) a(i, k) = Complex(d(rng), d(rng));
  const CMatrix h = 0.5 * (a + a.adjoint());
  const CMatrix p = 0.5 * (a - a.adjoint());
  return h + 0.1 * p;
}

Scenario scenario(Index n, double t1, double step) {
  Scenario s;
  s.name = "bench";
  s.hamiltonian.dim = n;
  s.hamiltonian.terms = {{ProfileExpr::parse("1 + 0.2*sin(t)"), random_generator(n, 7)}};
  s.psi0 = CVector::Zero(n);
  s.psi0(0) = 1.0;
  s.observables = {constant_observable("x", random_generator(n, 8))};
  s.t1 = t1;
  s.integrator.step = step;
  return s;
}

void BM_Integrate(benchmark::State& state) {
  const Scenario s = scenario(state.range(0), 1.0, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Integrate)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_IntegrateRichardson(benchmark::State& state) {
  Scenario s = scenario(state.range(0), 1.0, 1e-2);
  s.integrator.method = IntegratorConfig::Method::Rk4Richardson;
  s.integrator.error_tolerance = 1e-10;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s));
}
BENCHMARK(BM_IntegrateRichardson)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ToHeisenberg(benchmark::State& state) {
  const Scenario s = scenario(state.range(0), 0.1, 1e-3);
  const EvolutionBundle b = integrate(s);
  const TaggedOperator o = schrodinger_operator(random_generator(state.range(0), 9), b.grid.back());
  for (auto _ : state) benchmark::DoNotOptimize(to_heisenberg(o, b, b.size() - 1));
}
BENCHMARK(BM_ToHeisenberg)->Arg(2)->Arg(8)->Arg(32);

void BM_VerifySuite(benchmark::State& state) {
  const Scenario s = scenario(2, 2.0, 1e-3);
  const EvolutionBundle b = integrate(s);
  VerifyOptions o;
  o.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_suite(b, s, o));
}
BENCHMARK(BM_VerifySuite)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
