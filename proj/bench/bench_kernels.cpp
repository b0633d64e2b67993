// Serial reference kernels against the blocked/OpenMP ones at DMRG-like shapes.
//   bench_kernels --benchmark_filter=Matvec

#include <benchmark/benchmark.h>

#include <random>

#include "qtt/kernels.hpp"

using namespace qtt;

namespace {

struct Shapes {
  Environment left, right;
  OpCore w1, w2;
  TwoSite theta;
  Core bra, ket;
};

// chi = bra/ket bond, d = operator bond; `fill` is the fraction of nonzero operator entries.
Shapes make(Index chi, Index d, double fill) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  Shapes s{Environment(d, chi, chi), Environment(d, chi, chi), OpCore(d, d), OpCore(d, d), TwoSite(chi, chi), Core(chi, chi), Core(chi, chi)};
  for (auto& v : s.left.data) v = g(rng);
  for (auto& v : s.right.data) v = g(rng);
  for (auto* w : {&s.w1, &s.w2})
    for (auto& v : w->data()) v = u(rng) < fill ? g(rng) : 0.0;
  for (auto& v : s.theta.data) v = g(rng);
  for (auto* c : {&s.bra, &s.ket})
    for (auto& v : c->data()) v = g(rng);
  return s;
}

template <bool Parallel>
void Matvec(benchmark::State& state) {
  const auto s = make(state.range(0), state.range(1), state.range(2) / 100.0);
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::parallel::two_site_matvec(s.left, s.w1, s.w2, s.right, s.theta));
    else benchmark::DoNotOptimize(kernels::serial::two_site_matvec(s.left, s.w1, s.w2, s.right, s.theta));
  }
}

template <bool Parallel>
void ExtendLeft(benchmark::State& state) {
  const auto s = make(state.range(0), state.range(1), state.range(2) / 100.0);
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::parallel::extend_left(s.left, s.bra, s.w1, s.ket));
    else benchmark::DoNotOptimize(kernels::serial::extend_left(s.left, s.bra, s.w1, s.ket));
  }
}

template <bool Parallel>
void ExtendRight(benchmark::State& state) {
  const auto s = make(state.range(0), state.range(1), state.range(2) / 100.0);
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::parallel::extend_right(s.right, s.bra, s.w1, s.ket));
    else benchmark::DoNotOptimize(kernels::serial::extend_right(s.right, s.bra, s.w1, s.ket));
  }
}

template <bool Parallel>
void ApplyCore(benchmark::State& state) {
  const auto s = make(state.range(0), state.range(1), state.range(2) / 100.0);
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::parallel::apply_core(s.w1, s.ket));
    else benchmark::DoNotOptimize(kernels::serial::apply_core(s.w1, s.ket));
  }
}

// {chi, operator bond, fill %}: a sparse finite-difference MPO and a dense compressed potential.
// The serial reference loops over every index, so it only runs on the sparse shapes.
void shapes(benchmark::internal::Benchmark* b) { b->Args({16, 5, 20})->Args({32, 5, 20})->Unit(benchmark::kMillisecond); }
void large(benchmark::internal::Benchmark* b) {
  b->Args({32, 40, 100})->Args({64, 5, 20})->Args({64, 85, 100})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(Matvec<false>)->Apply(shapes);
BENCHMARK(Matvec<true>)->Apply(shapes)->Apply(large);
BENCHMARK(ExtendLeft<false>)->Apply(shapes);
BENCHMARK(ExtendLeft<true>)->Apply(shapes)->Apply(large);
BENCHMARK(ExtendRight<false>)->Apply(shapes);
BENCHMARK(ExtendRight<true>)->Apply(shapes)->Apply(large);
BENCHMARK(ApplyCore<false>)->Apply(shapes);
BENCHMARK(ApplyCore<true>)->Apply(shapes)->Apply(large);

BENCHMARK_MAIN();
