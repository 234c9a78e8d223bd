#include <benchmark/benchmark.h>

#include "pcase/approx.hpp"
#include "pcase/observe.hpp"
#include "pcase/rewrite.hpp"

using namespace pcase;

namespace {

Type bb() { return mk_fun(bool_type(), bool_type()); }

void BM_Normalize(benchmark::State& state) {
  TermP m = mk_apps(mk_or(), {mk_apps(mk_and(), {mk_omega(bool_type()), mk_one()}), mk_app(mk_not(), mk_one())});
  for (auto _ : state) benchmark::DoNotOptimize(normalize(m, Strategy::Fair, 10000));
}
BENCHMARK(BM_Normalize);

void BM_Phi(benchmark::State& state) {
  Context ctx;
  for (auto n : {"x", "y1", "y2", "z1", "z2"}) ctx[n] = bool_type();
  TermP m = read_term("pcase x (pcase x (y1, y2) (z1, z2)) (pcase x (z1, y2) (y1, z2))", ctx);
  for (auto _ : state) benchmark::DoNotOptimize(phi_measure(m));
}
BENCHMARK(BM_Phi);

// Systems are cached per type, so this mostly measures element enumeration.
void BM_PrimeLevel(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SystemP s = ps_level(mk_fun(bb(), bool_type()), n);
    benchmark::DoNotOptimize(elements(*s).size());
  }
}
BENCHMARK(BM_PrimeLevel)->DenseRange(1, 3);

void BM_Denote(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(denote(mk_pcf(), {}, n));
}
BENCHMARK(BM_Denote)->DenseRange(2, 5);

void BM_Approximations(benchmark::State& state) {
  TermP m = read_term("\\x:bool. pcase x (case x bot[void->bool] (\\y:void. @1)) @1");
  ApproxBudget budget{static_cast<std::size_t>(state.range(0)), 24, 8192};
  for (auto _ : state) benchmark::DoNotOptimize(approximations(m, budget).members.size());
}
BENCHMARK(BM_Approximations)->Arg(16)->Arg(64);

void BM_Definable(benchmark::State& state) {
  SystemP host = ps_level(bb(), 2);
  Element d = down_closure({p_fun({p_sum_tag(0)}, p_sum_tag(1))}, *host);
  for (auto _ : state) benchmark::DoNotOptimize(definable_term(d, bb(), 2));
}
BENCHMARK(BM_Definable);

void BM_Distinguish(benchmark::State& state) {
  TermP id = read_term("\\x:bool. x"), k0 = read_term("\\x:bool. @0");
  for (auto _ : state) benchmark::DoNotOptimize(distinguish(id, k0, 2, 20000).success);
}
BENCHMARK(BM_Distinguish);

}  // namespace
BENCHMARK_MAIN();
