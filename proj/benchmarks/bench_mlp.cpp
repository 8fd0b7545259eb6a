#include <benchmark/benchmark.h>

#include "hjbkit/mlp.hpp"
#include "hjbkit/problem.hpp"
#include "hjbkit/rng.hpp"

using namespace hjb;

namespace {

void BM_hamiltonian_closed_form(benchmark::State& state) {
  ControlProblem prob = make_cole_hopf(static_cast<int>(state.range(0)));
  RngStream rng = derive_stream(4, "bench-ham");
  Vec x(prob.d), p(prob.d);
  for (int i = 0; i < prob.d; ++i) {
    x[i] = rng.next_unit_open();
    p[i] = rng.next_unit_open() - 0.5;
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(hamiltonian(prob, 0.0, x, p));
}
BENCHMARK(BM_hamiltonian_closed_form)->Arg(2)->Arg(10)->Arg(50);

void BM_brute_force_hamiltonian(benchmark::State& state) {
  ControlProblem prob = make_cole_hopf(10);
  RngStream rng = derive_stream(5, "bench-brute");
  Vec x(10), p(10);
  for (int i = 0; i < 10; ++i) {
    x[i] = rng.next_unit_open();
    p[i] = rng.next_unit_open() - 0.5;
  }
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(brute_force_hamiltonian(prob, 0.0, x, p, grid));
}
BENCHMARK(BM_brute_force_hamiltonian)->Arg(100)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_mlp_estimate(benchmark::State& state) {
  ControlProblem prob = make_cole_hopf(10);
  MlpParams p;
  p.N = static_cast<int>(state.range(0));
  p.M = p.N;
  p.alpha_time = 0.5;
  p.seed = 7;
  p.threads = 1;
  const Vec x = Vec::Zero(10);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        mlp_estimate(prob, TruncationLevel{1.0}, p, 0.0, x).value);
  std::uint64_t draws =
      mlp_estimate(prob, TruncationLevel{1.0}, p, 0.0, x).meta.z_draws;
  state.counters["z_draws"] = static_cast<double>(draws);
}
BENCHMARK(BM_mlp_estimate)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
