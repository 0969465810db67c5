#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "pcl/chaos.hpp"
#include "pcl/diagram.hpp"
#include "pcl/partition.hpp"
#include "pcl/process.hpp"
#include "pcl/rng.hpp"
#include "pcl/simulation.hpp"
#include "pcl/spectral.hpp"

using namespace pcl;

static void BM_CharFn(benchmark::State& state) {
  const auto psi = Kernel::power_law(2.0).truncated(99);
  const Window w(-99, 99);
  double th = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(char_fn(th, psi, w));
    th += 1e-3;
  }
}
BENCHMARK(BM_CharFn);

static void BM_TensorPowerIntegrals(benchmark::State& state) {
  auto eng = make_engine(1);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<cplx> g(static_cast<std::size_t>(state.range(0)));
  for (auto& v : g) v = {U(eng), U(eng)};
  for (auto _ : state) benchmark::DoNotOptimize(tensor_power_integrals(g, cplx(0.3, 0.1), 8));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TensorPowerIntegrals)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oN);

static void BM_EnumeratePartitions(benchmark::State& state) {
  const GroupShape shape(std::vector<int>(static_cast<std::size_t>(state.range(0)), 2));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_partitions(shape, PartitionFilter::PiGe2));
}
BENCHMARK(BM_EnumeratePartitions)->DenseRange(2, 6);

static void BM_MomentOfProduct(benchmark::State& state) {
  const auto g = [](double x) { return cplx(std::sin(x), 0.0); };
  const int q = static_cast<int>(state.range(0));
  const std::vector<ProductKernel> ks{ProductKernel::tensor_power(1.0, g, q, 0),
                                      ProductKernel::tensor_power(1.0, g, q, 0)};
  const Window w(0.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(moment_of_product(ks, GroupShape({q, q}), w));
}
BENCHMARK(BM_MomentOfProduct)->DenseRange(1, 6);

static void BM_PathSummands(benchmark::State& state) {
  const auto psi = Kernel::power_law(2.0).truncated(99);
  const PathSimulator sim(psi, Nonlinearity::gaussian_bump(), 1, state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim.summands(++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PathSummands)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);

static void BM_MuSquaredChaos(benchmark::State& state) {
  const auto psi = Kernel::power_law(2.0).truncated(99);
  MuSquaredOptions o;
  o.shift_cutoff = state.range(0);
  const Window w = spectral_window(psi, o.shift_cutoff);
  for (auto _ : state)
    benchmark::DoNotOptimize(mu_squared(Nonlinearity::gaussian_bump(), 1, psi, w, MuMethod::ChaosSeries, o));
}
BENCHMARK(BM_MuSquaredChaos)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
