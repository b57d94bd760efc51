#include <benchmark/benchmark.h>

#include "wclt/charfun.hpp"
#include "wclt/discrepancy.hpp"
#include "wclt/edgeworth.hpp"
#include "wclt/moments.hpp"
#include "wclt/rng.hpp"
#include "wclt/sphere.hpp"

using wclt::DistributionSpec;
using wclt::MultiIndex;

static void BM_BuildP(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto r = static_cast<unsigned>(state.range(1));
  wclt::Rng rng(1);
  const wclt::CumulantTable kappa(k, r + 2, [&](const MultiIndex&) { return rng.uniform() - 0.5; });
  for (auto _ : state) benchmark::DoNotOptimize(wclt::build_P(r, kappa));
}
BENCHMARK(BM_BuildP)->ArgsProduct({{1, 2, 3}, {1, 2, 3, 4}});

static void BM_Cumulants(benchmark::State& state) {
  const auto law = DistributionSpec::rademacher_product(static_cast<std::size_t>(state.range(0)));
  const auto m = wclt::exact_moments(law, 8);
  for (auto _ : state) benchmark::DoNotOptimize(wclt::cumulants_from_moments(m));
}
BENCHMARK(BM_Cumulants)->Arg(1)->Arg(2)->Arg(3);

static void BM_SampleUniform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(wclt::sample_uniform(n, 1, stream++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleUniform)->Arg(16)->Arg(512)->Arg(4096);

static void BM_InversionGrid(benchmark::State& state) {
  const auto theta = wclt::sample_uniform(static_cast<std::size_t>(state.range(0)), 3);
  const wclt::ProductCF cf(DistributionSpec::rademacher_product(1), theta.values());
  for (auto _ : state) benchmark::DoNotOptimize(wclt::InversionGrid(cf, wclt::InversionSettings{}));
}
BENCHMARK(BM_InversionGrid)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_InversionCdf(benchmark::State& state) {
  const auto theta = wclt::sample_uniform(1024, 3);
  const wclt::ProductCF cf(DistributionSpec::rademacher_product(1), theta.values());
  const wclt::InversionGrid grid(cf, wclt::InversionSettings{});
  double x = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid.cdf(x));
    x = x > 2.0 ? -2.0 : x + 0.01;
  }
}
BENCHMARK(BM_InversionCdf)->Unit(benchmark::kMicrosecond);

static void BM_MonteCarloHalfspaces(benchmark::State& state) {
  const auto law = DistributionSpec::rademacher_product(2);
  const auto theta = wclt::sample_uniform(static_cast<std::size_t>(state.range(0)), 5);
  wclt::MonteCarloOptions opt;
  opt.samples = 100'000;
  opt.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wclt::discrepancy_mc(law, theta, wclt::SetClass::halfspaces(16), opt));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(opt.samples));
}
BENCHMARK(BM_MonteCarloHalfspaces)->Arg(32)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
