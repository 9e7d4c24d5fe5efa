#include <benchmark/benchmark.h>

#include "vqhd/exact.hpp"
#include "vqhd/metrics.hpp"
#include "vqhd/qite.hpp"
#include "vqhd/varqite.hpp"
#include "vqhd/vqse.hpp"

using namespace vqhd;

namespace {

void BM_ToDense(benchmark::State& state) {
  const PauliSum h = generate_r2l(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(h.to_dense());
}
BENCHMARK(BM_ToDense)->DenseRange(2, 5);

void BM_QiteTermStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PauliSum h = generate_r2l(n, 1);
  const StateVector psi = prepare_phi0(n);
  const PauliString& term = h.terms().front();
  const IndexList domain = select_domain(term.support(), n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(qite_term_step(psi, term, domain, 0.005));
}
BENCHMARK(BM_QiteTermStep)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond);

void BM_QiteSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PauliSum h = generate_rth(n, 1);
  QiteConfig cfg;
  cfg.beta = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(prepare_tfd(h, cfg));
}
BENCHMARK(BM_QiteSweep)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_Fidelity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PauliSum h = generate_rth(n, 1);
  const DensityMatrix a = thermal_state_exact(h, 0.5);
  const DensityMatrix b = thermal_state_exact(h, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity(a, b));
}
BENCHMARK(BM_Fidelity)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond);

void BM_ParameterShift(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DensityMatrix rho = thermal_state_exact(generate_r2l(n, 1), 0.1);
  const AnsatzCircuit v = build_vqse_ansatz(n, default_vqse_depth(n));
  const CostSpec spec = CostSpec::linear(n <= 4 ? std::size_t{1} << n : 8);
  for (auto _ : state) benchmark::DoNotOptimize(parameter_shift_gradient(rho, v, spec));
}
BENCHMARK(BM_ParameterShift)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond);

void BM_VarQiteStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PauliSum h = generate_rth(n, 1);
  QiteConfig cfg;
  cfg.beta = 0.01;
  const AnsatzCircuit c = build_varqite_ansatz(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(varqite_evolve(h, c, cfg));
}
BENCHMARK(BM_VarQiteStep)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
