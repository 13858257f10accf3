#include <random>

#include <benchmark/benchmark.h>

#include "tnload/compiler.hpp"
#include "tnload/mps.hpp"
#include "tnload/simulator.hpp"

namespace {

using namespace tnload;

Vector random_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
  return v / v.norm();
}

// Sequential SVD of a 16-qubit (256x256 image) state at increasing bond caps.
void BM_FromDense16(benchmark::State& state) {
  const Vector v = random_state(16, 1);
  const int chi = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mps::from_dense(v, chi).mps.largest_bond());
}
BENCHMARK(BM_FromDense16)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

// One full sweep over a depth-D circuit at N=10 against a dense target.
void BM_Sweep10(benchmark::State& state) {
  const Vector v = random_state(10, 2);
  const Mps target = mps::from_dense(v, 32).mps;
  const int depth = static_cast<int>(state.range(0));
  const auto start = compiler::iterative_construct(target, depth).circuit;
  SweepOptions so;
  so.n_sweeps = 1;
  for (auto _ : state) benchmark::DoNotOptimize(compiler::sweep_optimize(start, target, so).trace.final_overlap());
}
BENCHMARK(BM_Sweep10)->Arg(2)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_RunCircuit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mps target = mps::from_dense(random_state(n, 3), 8).mps;
  const auto c = compiler::iterative_construct(target, 4).circuit;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run(c).norm());
}
BENCHMARK(BM_RunCircuit)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_Sample(benchmark::State& state) {
  const StateVector s(16, random_state(16, 4));
  for (auto _ : state) benchmark::DoNotOptimize(sim::sample(s, 10000, 5).shots);
}
BENCHMARK(BM_Sample)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
