#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsmcmc/models/dataset.hpp"
#include "fsmcmc/proposal.hpp"
#include "fsmcmc/spectral_prior.hpp"
#include "fsmcmc/target.hpp"

namespace fsmcmc {

enum class ExperimentKind {
  kSample,
  kSweep,
  kTune,
  kCompare,
  kTwinGenerate,
  kValidate,
};

struct PriorSpec {
  std::string basis = "fourier1d";  // fourier1d | fourier2d | stokes
  double alpha = 2.0;
  double scale = 1.0;
  double ell = 10.0;       // fourier1d half-width
  double viscosity = 0.1;  // stokes
  std::size_t mode_count = 64;

  SpectralPrior build() const;
};

struct TargetSpec {
  std::string model = "prior";  // prior | density | linear_gaussian | darcy
                                // | stokes
  std::string dataset_path;     // JSON dataset for data-backed models
};

struct SamplerSpec {
  std::string kind = "pcn";  // pcn | indep | rw | theta-cn | cnl | pcnl
                             // | mwg | rtm-pcn | sieve-pcn
  std::optional<double> delta;
  std::optional<double> beta;
  double theta = 0.5;
  std::string precond = "covariance";  // covariance | identity
  std::size_t blocks = 0;              // mwg; 0 means one block per mode
  double trunc_rate = 0.01;            // rtm-pcn
  double sieve_rate = 0.0;             // sieve-pcn
  std::optional<std::array<double, 2>> random_beta;
  std::optional<std::array<double, 2>> random_delta;
  std::optional<PrecisionHyperprior> precision;  // Gibbs noise-precision
  std::string precision_mode = "gibbs";          // gibbs | marginal

  double scalar_step() const;  // delta (or beta mapped to delta)
  ProposalConfig proposal(/*for MH kinds*/) const;
  std::string label() const;
};

struct ObservableSpec {
  std::string kind = "point";  // point | mode | kappa_point | potential
                               // | trunc_level | active_count | precision
  double x = 0.0;
  std::array<double, 2> xy{0.0, 0.0};
  std::size_t index = 1;  // 1-based mode index

  std::string name() const;
};

struct TwinSpec {
  std::string model = "density";
  // density
  std::string true_density = "rho1";
  std::size_t observation_count = 100;
  std::size_t quad_points = 1025;
  // linear_gaussian
  std::vector<double> weights;
  // darcy
  std::string truth = "prior";  // prior | case1 | case2
  std::size_t grid_size = 32;
  double source_constant = 1.0;
  double boundary_value = 0.0;
  std::vector<std::array<double, 2>> measurement_points;
  // stokes
  double viscosity = 0.1;
  std::size_t mode_cutoff = 100;
  std::string obs_kind = "eulerian";
  std::vector<double> obs_times;
  std::size_t station_side = 3;
  double euler_dt = 0.01;
  // shared
  double noise_sigma = 0.01;
  std::string output_name = "dataset.json";
};

struct SweepSpec {
  std::vector<std::size_t> mesh_sizes;
  std::vector<double> scale_grid;  // beta for pcn, delta otherwise
  std::size_t steps_per_cell = 10000;
  std::size_t burn_in = 1000;
  std::string proposal_kind = "pcn";  // pcn | rw | theta-cn
  double theta = 0.5;
  std::string precond = "covariance";
};

struct TuneSpec {
  double target_acceptance = 0.234;
  std::size_t burst_length = 100;
  std::size_t max_bursts = 200;
  double c0 = 1.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSample;
  PriorSpec prior;
  TargetSpec target;
  SamplerSpec sampler;
  std::vector<SamplerSpec> compare_samplers;
  std::size_t length = 10000;
  std::optional<std::size_t> burn_in;  // default: 10% of length
  std::size_t thin = 1;
  std::size_t replicates = 1;
  std::vector<ObservableSpec> observables;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::optional<TwinSpec> twin;
  std::optional<SweepSpec> sweep;
  TuneSpec tune;
  bool compare_tune = true;  // compare: tune each tunable sampler first
  std::string validate_suite;
  std::size_t max_lag = 100;

  std::size_t effective_burn_in() const {
    return burn_in ? *burn_in : length / 10;
  }
};

/// Strict parse: unknown keys are rejected with their field path; domain
/// invariants (e.g. the trace-class gate) are checked eagerly.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Config echo with every defaulted value filled in, for manifests.
nlohmann::json config_to_json(const ExperimentConfig& config);

std::string experiment_kind_name(ExperimentKind kind);

}  // namespace fsmcmc
