// Serial reference vs OpenMP for the omega scans. Run with e.g.
//   SPECCOC_THREADS=8 ./bench_scan
#include <benchmark/benchmark.h>

#include "speccoc/cocycle.hpp"
#include "speccoc/config.hpp"
#include "speccoc/rauzy.hpp"
#include "speccoc/sadic.hpp"
#include "speccoc/scan.hpp"
#include "speccoc/spectral.hpp"

using namespace speccoc;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::openmp : Exec::serial; }

void singularity(benchmark::State& st) {
  const auto grid = log_grid(RealExpr("1/8"), RealExpr("8"), 64);
  const auto roof = Roof::from_exprs({RealExpr("1"), RealExpr("1")});
  for (auto _ : st) {
    auto rep = singularity_scan(stock_substitution("thue-morse"), roof, grid, 1000, 0.01, exec_of(st));
    benchmark::DoNotOptimize(rep.fraction_below);
  }
}

void dimension(benchmark::State& st) {
  const auto fib = DirectiveSequence::periodic({stock_substitution("fibonacci")});
  const auto spec = SuspensionSpec::make(fib, Roof::perron_frobenius(substitution_matrix(fib.term(1))));
  const auto f = CylFunction::simple({Complex(1, 0), Complex(0, 0)});
  const auto grid = log_grid(RealExpr("1/8"), RealExpr("8"), 64);
  for (auto _ : st) {
    auto rows = dimension_scan(fib, spec, f, grid, 200, exec_of(st));
    benchmark::DoNotOptimize(rows.data());
  }
}

void gr(benchmark::State& st) {
  const auto fib = DirectiveSequence::periodic({stock_substitution("fibonacci")});
  const auto spec = SuspensionSpec::make(fib, Roof::perron_frobenius(substitution_matrix(fib.term(1))));
  const auto f = CylFunction::simple({Complex(1, 0), Complex(0, 0)});
  const GRSampler sampler(fib, spec, 1000.0, 64, 1);
  std::vector<double> om, R;
  for (int k = 0; k < 16; ++k) om.push_back(0.125 * std::pow(64.0, k / 15.0));
  for (int k = 0; k <= 20; ++k) R.push_back(10.0 * std::pow(100.0, k / 20.0));
  for (auto _ : st) {
    auto rows = gr_dimension_scan(sampler, f, om, R, exec_of(st));
    benchmark::DoNotOptimize(rows.data());
  }
}

}  // namespace

BENCHMARK(singularity)->ArgName("openmp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(dimension)->ArgName("openmp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(gr)->ArgName("openmp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
