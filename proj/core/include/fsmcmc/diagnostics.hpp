#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fsmcmc/rng.hpp"

namespace fsmcmc {

/// A scalar observable recorded once per step.
struct Trace {
  std::vector<double> values;
  std::size_t burn_in = 0;
  std::string observable;

  std::span<const double> usable() const {
    return {values.data() + burn_in, values.size() - burn_in};
  }
};

struct AcfResult {
  std::vector<double> acf;  // acf[0] == 1 exactly
  bool degenerate = false;  // constant trace
};

/// Biased-normalized empirical autocorrelation of the post-burn-in values.
AcfResult autocorrelation(const Trace& trace, std::size_t max_lag);

/// Integrated autocorrelation time 1 + 2 sum_{k=1..max_lag} ACF(k),
/// fixed-window estimator.
double iact(const Trace& trace, std::size_t max_lag = 100);

struct SummaryRow {
  std::string observable;
  double mean = 0.0;
  double variance = 0.0;
  double mcse = 0.0;  // sample std * sqrt(IACT / n)
  double iact = 1.0;
  std::size_t n = 0;
  std::size_t burn_in = 0;
};

SummaryRow summarize(const Trace& trace, std::size_t max_lag = 100);

std::string summary_json(const std::vector<SummaryRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Mean-acceptance surface over (mesh refinement level, proposal scale).
struct AcceptanceCurve {
  std::vector<std::size_t> mesh_sizes;
  std::vector<double> scale_grid;
  std::vector<std::vector<double>> mean_acceptance;  // [mesh][scale]
  std::size_t steps_per_cell = 0;
  std::uint64_t seed = 0;
};

/// One MCMC cell: runs `steps` equilibration-plus-measurement steps at the
/// given mesh size and proposal scale, returning the measured mean
/// acceptance over the post-burn-in steps.
using SweepCell = std::function<double(std::size_t mesh, double scale,
                                       std::size_t steps, std::size_t burn_in,
                                       RngStream& rng)>;

/// Runs every (mesh, scale) cell on its own derived stream. Cells may run
/// concurrently; the result is a deterministic function of (inputs, seed).
AcceptanceCurve acceptance_sweep(const SweepCell& cell,
                                 std::span<const std::size_t> mesh_sizes,
                                 std::span<const double> scale_grid,
                                 std::size_t steps, std::size_t burn_in,
                                 std::uint64_t master_seed,
                                 bool parallel = true);

/// CSV with header mesh,beta,mean_acceptance,steps,seed.
std::string acceptance_csv(const AcceptanceCurve& curve);

struct TunerOptions {
  double target_acceptance = 0.234;
  std::size_t burst_length = 100;
  std::size_t max_bursts = 200;
  double c0 = 1.0;
  double scale_min = 1e-12;
  double scale_max = 1.0;
  double settle_tolerance = 0.05;
};

struct TuneResult {
  double scale = 0.0;
  double final_acceptance = 0.0;
  bool saturated = false;  // pinned at a bound or failed to settle
  std::size_t bursts = 0;
};

/// One burst of chain steps at the given proposal scale; returns the burst
/// mean acceptance. The chain advances, so tuning steps stay out of any
/// downstream statistics by construction.
using BurstRunner =
    std::function<double(double scale, std::size_t steps, RngStream& rng)>;

/// Stochastic-approximation tuner: scale <- scale * exp(c_k (mean - target))
/// with c_k = c0 / sqrt(k), clamped to [scale_min, scale_max].
TuneResult tune_step(const BurstRunner& burst, double initial_scale,
                     const TunerOptions& options, RngStream& rng);

}  // namespace fsmcmc
