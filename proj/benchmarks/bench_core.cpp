#include <benchmark/benchmark.h>

#include <cmath>

#include "mcmccoup/couplings.hpp"
#include "mcmccoup/fixed_points.hpp"
#include "mcmccoup/ode_limits.hpp"
#include "mcmccoup/special.hpp"

using namespace mcmccoup;

static void BM_Bvn(benchmark::State& st) {
  double a = -1.3, acc = 0.0;
  const double rho = st.range(0) / 1000.0;
  for (auto _ : st) {
    acc += bvn_low(a, 0.4, rho);
    a += 1e-9;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Bvn)->Arg(300)->Arg(950)->Arg(-999);

static void BM_GValue(benchmark::State& st) {
  double acc = 0.0;
  for (auto _ : st) acc += g_value(1.3, 0.7, 0.4, 2.38);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_GValue);

static void BM_CoupledRwmStep(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const auto kind = static_cast<CouplingKind>(st.range(1));
  const auto t = TargetModel::spherical(d);
  RngStream rng(1, 0);
  Eigen::VectorXd x(d), y(d);
  t.sample_stationary(rng, x);
  t.sample_stationary(rng, y);
  auto s = make_coupled_state(t, x, y);
  const CouplingSpec spec{kind, 0.0};
  const double h = 2.38 / std::sqrt(double(d));
  for (auto _ : st) coupled_rwm_step(s, spec, h, t, rng);
  st.SetLabel(to_string(kind));
}
BENCHMARK(BM_CoupledRwmStep)
    ->Args({100, int(CouplingKind::crn)})
    ->Args({1000, int(CouplingKind::crn)})
    ->Args({1000, int(CouplingKind::reflection)})
    ->Args({1000, int(CouplingKind::gcrn)})
    ->Args({1000, int(CouplingKind::reflection_maximal)});

static void BM_IntegrateW(benchmark::State& st) {
  const auto kind = static_cast<LimitKind>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(integrate_w({1.5, 0.5, 0.0}, 2.38, kind, 5.0));
  st.SetLabel(to_string(kind));
}
BENCHMARK(BM_IntegrateW)->Arg(int(LimitKind::crn))->Arg(int(LimitKind::gcrn))->Unit(benchmark::kMillisecond);

static void BM_SolveFixedPoint(benchmark::State& st) {
  double acc = 0.0;
  for (auto _ : st) acc += solve_fixed_point(LimitKind::reflection, 2.38, 3.0).v_star;
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_SolveFixedPoint)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
