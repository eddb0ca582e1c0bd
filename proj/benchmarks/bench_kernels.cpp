#include <benchmark/benchmark.h>

#include "ness/currents.hpp"
#include "ness/kernel_table.hpp"
#include "ness/oracle.hpp"
#include "ness/propagators.hpp"

namespace {

using namespace ness;

ChainModel chain(int n) { return {n, 10.0, 10.0, 1.0}; }

BathSet baths_for(const ChainModel& m) {
  std::vector<double> temps;
  for (int i = 0; i < m.n_sites; ++i) temps.push_back((100.0 * (m.n_sites - 1 - i) + 0.002 * i) / (m.n_sites - 1));
  return BathSet::from_temperatures(temps, default_cutoff(m));
}

void BM_DenseSolve(benchmark::State& state) {
  const ChainModel m = chain(static_cast<int>(state.range(0)));
  const Eigen::MatrixXd w2 = build_frequency_matrix(m);
  double w = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fourier_propagator(w, w2, m.gamma));
    w += 1e-3;
  }
}
BENCHMARK(BM_DenseSolve)->Arg(2)->Arg(8)->Arg(32);

void BM_ModalPropagator(benchmark::State& state) {
  const ModalPropagator prop(chain(static_cast<int>(state.range(0))));
  Eigen::MatrixXcd out;
  double w = 0.1;
  for (auto _ : state) {
    prop.evaluate(w, out);
    benchmark::DoNotOptimize(out.data());
    w += 1e-3;
  }
}
BENCHMARK(BM_ModalPropagator)->Arg(2)->Arg(8)->Arg(32);

void BM_KernelTable(benchmark::State& state) {
  const ChainModel m = chain(static_cast<int>(state.range(0)));
  const BathSet b = baths_for(m);
  const QuadratureSpec spec = default_quadrature(m, b);
  for (auto _ : state) benchmark::DoNotOptimize(build_kernel_table(m, b, spec, 1));
}
BENCHMARK(BM_KernelTable)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ReportFromTable(benchmark::State& state) {
  const ChainModel m = chain(static_cast<int>(state.range(0)));
  const BathSet b = baths_for(m);
  const QuadratureSpec spec = default_quadrature(m, b);
  const KernelTable table = build_kernel_table(m, b, spec, 1);
  for (auto _ : state) {
    const FirstOrderTensors t = first_order_tensors(table);
    benchmark::DoNotOptimize(ness_report(m, b, {NonlinearityKind::BetaFput, 0.01}, spec, table, t));
  }
}
BENCHMARK(BM_ReportFromTable)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TimeDomainOracle(benchmark::State& state) {
  const ChainModel m = chain(2);
  const BathSet b = baths_for(m);
  for (auto _ : state) benchmark::DoNotOptimize(zeroth_order_time_domain(m, b, {}));
}
BENCHMARK(BM_TimeDomainOracle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
