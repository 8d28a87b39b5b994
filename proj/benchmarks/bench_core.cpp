#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>

#include "efron/efron.hpp"
#include "efron/identities.hpp"
#include "efron/oracle.hpp"

using namespace efron;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void BM_IntegrateNormal(benchmark::State& state) {
  for (auto _ : state) {
    const auto r = integrate([](double x) { return std::exp(-0.5 * x * x); }, Interval{-kInf, kInf});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_IntegrateNormal);

void BM_MeasureBuild(benchmark::State& state) {
  const auto d = gamma_density(2.0);
  for (auto _ : state) {
    Measure1D m(d);
    benchmark::DoNotOptimize(m.cdf(1.0));
  }
}
BENCHMARK(BM_MeasureBuild);

void BM_DensityRecovery(benchmark::State& state) {
  const Measure1D m(logistic_density());
  double x = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(density_recovery(m, x));
    x = x > 2.0 ? -2.0 : x + 0.1;
  }
}
BENCHMARK(BM_DensityRecovery);

void BM_SliceBuild(benchmark::State& state) {
  const auto model = parse_model("independent:x=logistic,y=gamma(2)");
  for (auto _ : state) {
    ConditionalSlice sl(model, 1.5);
    benchmark::DoNotOptimize(sl.J1());
  }
}
BENCHMARK(BM_SliceBuild);

void BM_DdsSurvival(benchmark::State& state) {
  const ConditionalSlice sl(parse_model("gaussian:sigma=1,tau=2,rho=0.3"), 0.5);
  const auto axis = state.range(0) == 0 ? Axis::X : Axis::Y;
  for (auto _ : state) benchmark::DoNotOptimize(dds_survival(sl, axis, 0.2).value);
}
BENCHMARK(BM_DdsSurvival)->Arg(0)->Arg(1);

void BM_DerivativeLowerBound(benchmark::State& state) {
  const auto model = parse_model("independent:x=logistic,y=logistic");
  const auto psi = parse_psi("tanh(x)");
  for (auto _ : state) benchmark::DoNotOptimize(derivative_lower_bound(model, psi, 0.5).bound_mixed);
}
BENCHMARK(BM_DerivativeLowerBound)->Unit(benchmark::kMillisecond);

void BM_GridOracle(benchmark::State& state) {
  const auto model = parse_model("independent:x=gamma(2),y=gamma(3)");
  const auto psi = parse_psi("x");
  const GridOracleConfig cfg{static_cast<int>(state.range(0)), 1e-8, 0};
  for (auto _ : state) benchmark::DoNotOptimize(grid_conditional_expectation(model, psi, 3.0, cfg));
}
BENCHMARK(BM_GridOracle)->Arg(1001)->Arg(4001);

}  // namespace

BENCHMARK_MAIN();
