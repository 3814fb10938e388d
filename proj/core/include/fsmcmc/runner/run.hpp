#pragma once

#include <optional>
#include <string>

#include "fsmcmc/diagnostics.hpp"
#include "fsmcmc/runner/config.hpp"
#include "fsmcmc/sampler.hpp"

namespace fsmcmc {

struct BuiltTarget {
  SpectralPrior prior;
  Target target;
  std::optional<Dataset> dataset;
};

/// Wires a prior and a dataset-backed model into a Target. Analytic
/// gradients are attached where the model has them (density,
/// linear_gaussian); `need_gradient` adds the central finite-difference
/// fallback for the PDE models.
BuiltTarget build_target(const PriorSpec& prior_spec,
                         const TargetSpec& target_spec, bool need_gradient);
BuiltTarget build_target_from_dataset(const PriorSpec& prior_spec,
                                      const Dataset& dataset,
                                      bool need_gradient);

struct ChainRunOutput {
  std::vector<Trace> traces;  // one per observable, burn_in set
  std::vector<std::uint8_t> accepted;
  double mean_acceptance = 0.0;  // post burn-in, coefficient moves
  CoefficientState final_state;
};

/// Runs one chain of `length` steps (MwG counts one block update per
/// step), recording every observable each step.
ChainRunOutput run_chain(const SpectralPrior& prior, const Target& target,
                         const SamplerSpec& sampler,
                         const std::vector<ObservableSpec>& observables,
                         std::size_t length, std::size_t burn_in,
                         RngStream& rng);

struct RunOutcome {
  int exit_code = 0;  // 0 success, 2 config error, 3 runtime failure
  std::string message;
};

/// Executes the experiment and persists traces, summaries, curves and a
/// deterministic manifest under config.output_dir (wall time goes to a
/// separate timing file so outputs stay bitwise reproducible).
RunOutcome run_experiment(const ExperimentConfig& config);

}  // namespace fsmcmc
