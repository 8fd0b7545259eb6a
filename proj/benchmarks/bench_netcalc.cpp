#include <benchmark/benchmark.h>

#include "hjbkit/hamnet.hpp"
#include "hjbkit/netcalc.hpp"
#include "hjbkit/problem.hpp"
#include "hjbkit/rng.hpp"

using namespace hjb;

namespace {

Vec random_input(int n, RngStream& rng, double radius) {
  Vec v(n);
  for (int i = 0; i < n; ++i)
    v[i] = (2.0 * rng.next_unit_open() - 1.0) * radius;
  return v;
}

void BM_sq_realize(benchmark::State& state) {
  NeuralNet net = sq_net(static_cast<int>(state.range(0)));
  RngStream rng = derive_stream(1, "bench-sq");
  Vec x(1);
  for (auto _ : state) {
    x[0] = rng.next_unit_open();
    benchmark::DoNotOptimize(net.realize(x));
  }
  state.counters["size"] = static_cast<double>(net.size());
}
BENCHMARK(BM_sq_realize)->Arg(2)->Arg(4)->Arg(8);

void BM_matvec_realize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  NeuralNet net = matvec_net(n, n, 4.0, 1e-3);
  RngStream rng = derive_stream(2, "bench-matvec");
  Vec x = random_input(n * n + n, rng, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(net.realize(x));
  state.counters["size"] = static_cast<double>(net.size());
}
BENCHMARK(BM_matvec_realize)->Arg(2)->Arg(4)->Arg(8);

void BM_hamiltonian_net_build(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  FamilySpec s = make_p1(d).spec;
  s.R_override = 1.0;
  ControlProblem prob = make_problem(s);
  ProblemNets pn = build_problem_nets(prob);
  for (auto _ : state) {
    HamiltonianNetBuild hb =
        build_hamiltonian_net(pn, prob, TruncationLevel{1.0}, 1e-2);
    benchmark::DoNotOptimize(hb.net.size());
  }
}
BENCHMARK(BM_hamiltonian_net_build)->Arg(2)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_hamiltonian_net_realize(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  FamilySpec s = make_p1(d).spec;
  s.R_override = 1.0;
  ControlProblem prob = make_problem(s);
  ProblemNets pn = build_problem_nets(prob);
  HamiltonianNetBuild hb =
      build_hamiltonian_net(pn, prob, TruncationLevel{1.0}, 1e-2);
  RngStream rng = derive_stream(3, "bench-hamnet");
  Vec x = random_input(1 + 2 * d, rng, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(hb.net.realize(x));
  state.counters["size"] = static_cast<double>(hb.net.size());
}
BENCHMARK(BM_hamiltonian_net_realize)->Arg(2)->Arg(8)->Arg(16);

}  // namespace
