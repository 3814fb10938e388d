#include <benchmark/benchmark.h>

#include "fsmcmc/gibbs.hpp"
#include "fsmcmc/models/darcy.hpp"
#include "fsmcmc/models/dataset.hpp"
#include "fsmcmc/models/density.hpp"
#include "fsmcmc/models/stokes.hpp"
#include "fsmcmc/sampler.hpp"

namespace {

using namespace fsmcmc;

void BM_synthesize_grid(benchmark::State& state) {
  const auto n_modes = static_cast<std::size_t>(state.range(0));
  const auto prior = SpectralPrior::fourier1d(2.0, 1.0, 10.0, n_modes);
  RngStream rng(1);
  const CoefficientState u = prior.sample(rng);
  std::vector<double> grid(1025);
  for (std::size_t g = 0; g < grid.size(); ++g)
    grid[g] = -10.0 + 20.0 * static_cast<double>(g) / 1024.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(prior.synthesize(u, grid));
}
BENCHMARK(BM_synthesize_grid)->Arg(64)->Arg(256)->Arg(1024);

void BM_density_potential(benchmark::State& state) {
  const auto n_modes = static_cast<std::size_t>(state.range(0));
  const auto prior = SpectralPrior::fourier1d(2.0, 1.0, 10.0, n_modes);
  const Dataset ds = make_density_twin("rho1", 10.0, 100, 1025, 7);
  DensityTarget target(prior, ds.density.value());
  RngStream rng(2);
  const CoefficientState u = prior.sample(rng);
  for (auto _ : state) benchmark::DoNotOptimize(target.potential(u));
}
BENCHMARK(BM_density_potential)->Arg(64)->Arg(256)->Arg(1024);

void BM_pcn_step_density(benchmark::State& state) {
  const auto prior = SpectralPrior::fourier1d(2.0, 1.0, 10.0, 256);
  const Dataset ds = make_density_twin("rho1", 10.0, 100, 1025, 7);
  DensityTarget dt(prior, ds.density.value());
  const Target target = dt.as_target();
  RngStream rng(3);
  ChainState chain = make_chain_state(prior.sample(rng), target);
  const ProposalConfig config = ProposalConfig::pcn(0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(mh_step(chain, target, prior, config, rng));
}
BENCHMARK(BM_pcn_step_density);

void BM_rtm_step_density(benchmark::State& state) {
  const auto prior = SpectralPrior::fourier1d(1.001, 1.0, 10.0, 64);
  const Dataset ds = make_density_twin("rho2", 10.0, 1000, 1025, 7);
  DensityTarget dt(prior, ds.density.value());
  const Target target = dt.as_target();
  const TruncationLaw law(0.01, 64);
  RngStream rng(4);
  CoefficientState init = prior.sample(rng);
  init.trunc = law.sample(rng);
  ChainState chain = make_chain_state(init, target);
  for (auto _ : state)
    benchmark::DoNotOptimize(rtm_step(chain, target, law, 0.2, rng));
}
BENCHMARK(BM_rtm_step_density);

void BM_darcy_solve(benchmark::State& state) {
  const auto grid = static_cast<std::size_t>(state.range(0));
  const auto prior = SpectralPrior::fourier2d(2.0, 1.0, 16);
  RngStream rng(5);
  const CoefficientState u = prior.sample(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(darcy_solve(
        grid,
        [&](double x, double y) { return prior.synthesize_at(u, x, y); },
        [](double, double) { return 1.0; }, 0.0));
  }
}
BENCHMARK(BM_darcy_solve)->Arg(16)->Arg(32)->Arg(64);

void BM_lagrangian_forward(benchmark::State& state) {
  const auto prior = SpectralPrior::stokes_div_free(2.0, 400.0, 0.1, 100);
  StokesProblem problem;
  problem.mode_cutoff = 100;
  problem.obs_kind = StokesProblem::ObsKind::kLagrangian;
  problem.obs_times = {0.25, 0.5, 0.75, 1.0};
  problem.stations = station_grid(3);
  RngStream rng(6);
  const CoefficientState u = prior.sample(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(lagrangian_forward(u, problem, prior));
}
BENCHMARK(BM_lagrangian_forward);

}  // namespace

BENCHMARK_MAIN();
