#include <benchmark/benchmark.h>

#include <numbers>

#include "wavedim/bounds.hpp"
#include "wavedim/dynamics.hpp"
#include "wavedim/ineq.hpp"
#include "wavedim/lyapunov.hpp"

using namespace wavedim;

namespace {

NonlinearitySpec rotational(double gamma) {
  NonlinearitySpec s;
  s.gamma = gamma;
  s.rotational = true;
  return s;
}

void BM_Nonlinearity(benchmark::State& state) {
  GalerkinModel m(Domain::interval(std::numbers::pi), static_cast<std::size_t>(state.range(0)), 2, rotational(0.1));
  const GalerkinState s = m.random_state(1, 1.0);
  Eigen::MatrixXd out;
  for (auto _ : state) {
    m.eval_nonlinearity(s.u, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Nonlinearity)->Arg(16)->Arg(64)->Arg(256);

void BM_Step(benchmark::State& state) {
  GalerkinModel m(Domain::interval(std::numbers::pi), static_cast<std::size_t>(state.range(0)), 2, rotational(0.1));
  GalerkinState s = m.random_state(1, 1.0);
  const double dt = m.max_step();
  for (auto _ : state) m.step(s, dt);
}
BENCHMARK(BM_Step)->Arg(16)->Arg(64)->Arg(256);

void BM_StepCubic2D(benchmark::State& state) {
  NonlinearitySpec spec;
  spec.gamma = 0.1;
  spec.potential = Polynomial::separable_power(1, 0.25, 4);
  GalerkinModel m(Domain::rectangle(1.0, 1.0), static_cast<std::size_t>(state.range(0)), 1, spec);
  GalerkinState s = m.random_state(1, 1.0);
  const double dt = m.max_step();
  for (auto _ : state) m.step(s, dt);
}
BENCHMARK(BM_StepCubic2D)->Arg(64)->Arg(256);

void BM_QrInterval(benchmark::State& state) {
  GalerkinModel m(Domain::interval(std::numbers::pi), 64, 2, rotational(0.1));
  const auto k = state.range(0);
  const GalerkinState base = m.random_state(1, 1.0);
  VariationalBundle b(m, base, Eigen::MatrixXd::Identity(256, k), 0.025);
  const double dt = m.max_step();
  for (auto _ : state) {
    for (int i = 0; i < 8; ++i) b.step(dt);
    benchmark::DoNotOptimize(b.orthonormalize());
  }
}
BENCHMARK(BM_QrInterval)->Arg(16)->Arg(64)->Arg(256);

void BM_UnstableCount(benchmark::State& state) {
  const Spectrum s = build_spectrum(Domain::rectangle(std::numbers::pi, std::numbers::pi), 4096);
  for (auto _ : state) benchmark::DoNotOptimize(unstable_mode_count(0.025, 0.0, 1.0, s).count);
}
BENCHMARK(BM_UnstableCount);

void BM_CampaignRhoD1(benchmark::State& state) {
  CampaignOptions o;
  o.kind = CampaignKind::RhoD1;
  o.families = 20;
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign(o).passed);
}
BENCHMARK(BM_CampaignRhoD1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
