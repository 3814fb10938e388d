#include "fsmcmc/runner/run.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fsmcmc/gibbs.hpp"
#include "fsmcmc/runner/validate.hpp"
#include "fsmcmc/version.hpp"

namespace fsmcmc {

namespace {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (const char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

double eval_observable(const ObservableSpec& obs, const SpectralPrior& prior,
                       const CoefficientState& state, double phi, double tau) {
  if (obs.kind == "point")
    return prior.dims() == 1 ? prior.synthesize_at(state, obs.x)
                             : prior.synthesize_at(state, obs.xy[0], obs.xy[1]);
  if (obs.kind == "kappa_point")
    return std::exp(prior.dims() == 1
                        ? prior.synthesize_at(state, obs.x)
                        : prior.synthesize_at(state, obs.xy[0], obs.xy[1]));
  if (obs.kind == "mode") {
    const std::size_t i = obs.index - 1;
    if (i >= state.z.size())
      throw std::out_of_range("observable: mode index out of range");
    return state.is_active(i) ? prior.mode_std(i) * state.z[i] : 0.0;
  }
  if (obs.kind == "potential") return phi;
  if (obs.kind == "trunc_level")
    return static_cast<double>(state.trunc.value_or(0));
  if (obs.kind == "active_count")
    return static_cast<double>(state.active_count());
  if (obs.kind == "precision") return tau;
  throw std::invalid_argument("observable: unknown kind " + obs.kind);
}

Target attach_gradient_if_needed(Target target, bool need_gradient) {
  if (need_gradient && !target.has_gradient())
    return with_fd_gradient(std::move(target));
  return target;
}

std::string trace_csv(const Trace& trace,
                      const std::vector<std::uint8_t>& accepted,
                      std::size_t burn_in, std::size_t thin) {
  std::ostringstream out;
  out << "step,value,accepted\n";
  for (std::size_t s = burn_in; s < trace.values.size(); s += thin)
    out << s << ',' << format_double(trace.values[s]) << ','
        << static_cast<int>(accepted[s]) << '\n';
  return out.str();
}

bool pcn_scale_family(const std::string& kind) {
  return kind == "pcn" || kind == "rtm-pcn" || kind == "sieve-pcn";
}

/// Tunes the sampler's step scale against its own scratch chain and writes
/// the result back into the spec (beta for the pCN family, delta
/// otherwise).
TuneResult tune_sampler(SamplerSpec& sampler, const BuiltTarget& built,
                        const TuneSpec& tune, RngStream& rng) {
  if (sampler.kind == "mwg" || sampler.kind == "indep")
    throw std::invalid_argument("tune: sampler '" + sampler.kind +
                                "' has no tunable scale");
  const bool pcn_family = pcn_scale_family(sampler.kind);

  TunerOptions options;
  options.target_acceptance = tune.target_acceptance;
  options.burst_length = tune.burst_length;
  options.max_bursts = tune.max_bursts;
  options.c0 = tune.c0;
  options.scale_max = pcn_family ? 1.0 : 16.0;

  CoefficientState init = built.prior.sample(rng);
  std::optional<TruncationLaw> trunc_law;
  if (sampler.kind == "rtm-pcn") {
    trunc_law.emplace(sampler.trunc_rate, built.prior.mode_count());
    init.trunc = trunc_law->sample(rng);
  }
  if (sampler.kind == "sieve-pcn") {
    std::vector<std::uint8_t> sw(built.prior.mode_count());
    for (auto& s : sw) s = rng.uniform() < 0.5 ? 1 : 0;
    init.switches = std::move(sw);
  }
  ChainState chain = make_chain_state(std::move(init), built.target);
  SieveLaw sieve_law{sampler.sieve_rate};

  BurstRunner burst = [&](double scale, std::size_t steps, RngStream& r) {
    std::size_t accepted = 0;
    for (std::size_t s = 0; s < steps; ++s) {
      bool ok = false;
      if (sampler.kind == "rtm-pcn") {
        ok = rtm_step(chain, built.target, *trunc_law, scale, r).coeff_accepted;
      } else if (sampler.kind == "sieve-pcn") {
        ok = sieve_step(chain, built.target, sieve_law, scale, r)
                 .coeff_accepted;
      } else {
        SamplerSpec at_scale = sampler;
        at_scale.beta.reset();
        at_scale.delta.reset();
        if (pcn_family)
          at_scale.beta = scale;
        else
          at_scale.delta = scale;
        ok = mh_step(chain, built.target, built.prior, at_scale.proposal(), r)
                 .accepted;
      }
      if (ok) ++accepted;
    }
    return static_cast<double>(accepted) / static_cast<double>(steps);
  };

  double initial;
  if (pcn_family)
    initial = sampler.beta
                  ? *sampler.beta
                  : beta_from_delta(sampler.delta.value_or(0.5));
  else
    initial = sampler.delta.value_or(0.1);

  const TuneResult result = tune_step(burst, initial, options, rng);
  sampler.beta.reset();
  sampler.delta.reset();
  if (pcn_family)
    sampler.beta = result.scale;
  else
    sampler.delta = result.scale;
  return result;
}

}  // namespace

BuiltTarget build_target_from_dataset(const PriorSpec& prior_spec,
                                      const Dataset& dataset,
                                      bool need_gradient) {
  BuiltTarget built{prior_spec.build(), Target{}, dataset};
  if (dataset.model == "density") {
    DensityTarget dt(built.prior, dataset.density.value());
    built.target = dt.as_target();
  } else if (dataset.model == "linear_gaussian") {
    built.target =
        make_linear_gaussian_target(dataset.linear.value(), built.prior);
  } else if (dataset.model == "darcy") {
    if (built.prior.basis() != BasisKind::kFourier2d)
      throw std::invalid_argument("darcy target: prior basis must be fourier2d");
    built.target = attach_gradient_if_needed(
        make_darcy_target(dataset.darcy.value(), built.prior), need_gradient);
  } else if (dataset.model == "stokes") {
    if (built.prior.basis() != BasisKind::kStokesDivFree)
      throw std::invalid_argument("stokes target: prior basis must be stokes");
    const auto& problem = dataset.stokes.value();
    if (problem.mode_cutoff != built.prior.mode_count())
      throw std::invalid_argument(
          "stokes target: prior mode_count must equal problem mode_cutoff");
    built.target = attach_gradient_if_needed(
        make_stokes_target(problem, built.prior), need_gradient);
  } else {
    throw std::invalid_argument("build_target: unknown dataset model " +
                                dataset.model);
  }
  return built;
}

BuiltTarget build_target(const PriorSpec& prior_spec,
                         const TargetSpec& target_spec, bool need_gradient) {
  if (target_spec.model == "prior")
    return {prior_spec.build(), prior_target(), std::nullopt};
  const Dataset dataset = load_dataset(target_spec.dataset_path);
  if (dataset.model != target_spec.model)
    throw std::invalid_argument("build_target: dataset model '" +
                                dataset.model + "' does not match target '" +
                                target_spec.model + "'");
  return build_target_from_dataset(prior_spec, dataset, need_gradient);
}

ChainRunOutput run_chain(const SpectralPrior& prior, const Target& target,
                         const SamplerSpec& sampler,
                         const std::vector<ObservableSpec>& observables,
                         std::size_t length, std::size_t burn_in,
                         RngStream& rng) {
  if (burn_in >= length && length > 0)
    throw std::invalid_argument("run_chain: burn-in must be below length");

  ChainRunOutput out;
  out.traces.resize(observables.size());
  for (std::size_t o = 0; o < observables.size(); ++o) {
    out.traces[o].observable = observables[o].name();
    out.traces[o].burn_in = burn_in;
    out.traces[o].values.reserve(length);
  }
  out.accepted.reserve(length);

  CoefficientState init = prior.sample(rng);
  const bool is_rtm = sampler.kind == "rtm-pcn";
  const bool is_sieve = sampler.kind == "sieve-pcn";
  const bool is_mwg = sampler.kind == "mwg";

  std::optional<TruncationLaw> trunc_law;
  if (is_rtm) {
    trunc_law.emplace(sampler.trunc_rate, prior.mode_count());
    init.trunc = trunc_law->sample(rng);
  }
  SieveLaw sieve_law{sampler.sieve_rate};
  if (is_sieve) {
    std::vector<std::uint8_t> sw(prior.mode_count());
    for (auto& s : sw) s = rng.uniform() < 0.5 ? 1 : 0;
    init.switches = std::move(sw);
  }

  // Precision-Gibbs keeps (u, tau) jointly; the marginal mode swaps in the
  // tau-integrated potential and draws tau per recorded step.
  if (sampler.precision && sampler.precision_mode == "gibbs") {
    if (sampler.kind != "pcn")
      throw std::invalid_argument(
          "run_chain: gibbs precision updates require the pcn sampler");
    if (!target.misfit)
      throw std::invalid_argument("run_chain: precision needs a misfit model");
    const double beta = beta_from_delta(sampler.scalar_step());
    PrecisionGibbs gibbs(target, *sampler.precision, std::move(init), 1.0);
    std::size_t accepted_after_burn = 0;
    for (std::size_t s = 0; s < length; ++s) {
      const auto r = gibbs.sweep(beta, rng);
      out.accepted.push_back(r.accepted ? 1 : 0);
      if (r.accepted && s >= burn_in) ++accepted_after_burn;
      const double phi = 0.5 * r.tau * gibbs.residual_sq();
      for (std::size_t o = 0; o < observables.size(); ++o)
        out.traces[o].values.push_back(
            eval_observable(observables[o], prior, gibbs.state(), phi, r.tau));
    }
    out.mean_acceptance = length > burn_in
                              ? static_cast<double>(accepted_after_burn) /
                                    static_cast<double>(length - burn_in)
                              : 0.0;
    out.final_state = gibbs.state();
    return out;
  }

  Target effective = target;
  const bool marginal =
      sampler.precision && sampler.precision_mode == "marginal";
  if (marginal) {
    if (!target.misfit)
      throw std::invalid_argument("run_chain: precision needs a misfit model");
    const PrecisionHyperprior hyper = *sampler.precision;
    const Target base = target;
    effective.potential = [base, hyper](const CoefficientState& s) {
      return marginal_potential(base, hyper, s);
    };
    effective.gradient = nullptr;
  }

  ChainState chain = make_chain_state(std::move(init), effective);
  const ProposalConfig proposal =
      is_rtm || is_sieve || is_mwg ? ProposalConfig{} : sampler.proposal();
  const double pcn_beta = (is_rtm || is_sieve)
                              ? beta_from_delta(sampler.scalar_step())
                              : 0.0;
  std::vector<std::vector<std::size_t>> partition;
  std::size_t next_block = 0;
  if (is_mwg) {
    const std::size_t blocks =
        sampler.blocks == 0 ? prior.mode_count() : sampler.blocks;
    partition = kl_blocks(prior.mode_count(), blocks);
  }

  std::size_t accepted_after_burn = 0;
  for (std::size_t s = 0; s < length; ++s) {
    bool accepted = false;
    if (is_mwg) {
      accepted =
          mwg_block_step(chain, effective, partition[next_block], rng).accepted;
      next_block = (next_block + 1) % partition.size();
    } else if (is_rtm) {
      accepted =
          rtm_step(chain, effective, *trunc_law, pcn_beta, rng).coeff_accepted;
    } else if (is_sieve) {
      accepted =
          sieve_step(chain, effective, sieve_law, pcn_beta, rng).coeff_accepted;
    } else {
      accepted = mh_step(chain, effective, prior, proposal, rng).accepted;
    }
    out.accepted.push_back(accepted ? 1 : 0);
    if (accepted && s >= burn_in) ++accepted_after_burn;

    double tau = 0.0;
    if (marginal)
      tau = sample_precision(target, chain.state, *sampler.precision, rng);
    for (std::size_t o = 0; o < observables.size(); ++o)
      out.traces[o].values.push_back(
          eval_observable(observables[o], prior, chain.state, chain.phi, tau));
  }
  out.mean_acceptance = length > burn_in
                            ? static_cast<double>(accepted_after_burn) /
                                  static_cast<double>(length - burn_in)
                            : 0.0;
  out.final_state = chain.state;
  return out;
}

namespace {

nlohmann::json base_manifest(const ExperimentConfig& config) {
  nlohmann::json manifest;
  manifest["config"] = config_to_json(config);
  manifest["seed"] = config.seed;
  manifest["version"] = kVersion;
  manifest["rng"] = RngStream::kAlgorithm;
  return manifest;
}

void run_sample(const ExperimentConfig& config, const fs::path& out_dir,
                nlohmann::json& manifest) {
  const bool needs_grad =
      config.sampler.kind == "cnl" || config.sampler.kind == "pcnl";
  const BuiltTarget built =
      build_target(config.prior, config.target, needs_grad);
  const std::size_t burn = config.effective_burn_in();

  if (built.dataset && built.dataset->truth_z) {
    CoefficientState truth;
    truth.z = *built.dataset->truth_z;
    manifest["phi_at_truth"] = built.target.potential(truth);
  }

  std::vector<SummaryRow> rows;
  nlohmann::json accept_info = nlohmann::json::array();
  for (std::size_t r = 0; r < config.replicates; ++r) {
    RngStream rng = RngStream::derive(config.seed, r + 1);
    const ChainRunOutput chain =
        run_chain(built.prior, built.target, config.sampler,
                  config.observables, config.length, burn, rng);
    accept_info.push_back(chain.mean_acceptance);
    for (std::size_t o = 0; o < chain.traces.size(); ++o) {
      SummaryRow row = summarize(chain.traces[o], config.max_lag);
      if (config.replicates > 1) row.observable += "/r" + std::to_string(r);
      rows.push_back(row);
      const std::string name =
          "trace_" + sanitize(config.observables[o].name()) +
          (config.replicates > 1 ? "_r" + std::to_string(r) : "") + ".csv";
      write_file(out_dir / name,
                 trace_csv(chain.traces[o], chain.accepted, burn, config.thin));
    }
  }
  write_file(out_dir / "summary.json", summary_json(rows));
  write_file(out_dir / "summary.csv", summary_csv(rows));
  manifest["mean_acceptance"] = accept_info;
}

void run_sweep(const ExperimentConfig& config, const fs::path& out_dir,
               nlohmann::json& manifest) {
  const SweepSpec& sweep = config.sweep.value();
  if (config.target.model != "prior" && config.target.model != "density")
    throw std::invalid_argument("sweep: target model must be prior or density");

  std::optional<Dataset> dataset;
  if (config.target.model == "density")
    dataset = load_dataset(config.target.dataset_path);

  const PriorSpec base_prior = config.prior;
  SweepCell cell = [&](std::size_t mesh, double scale, std::size_t steps,
                       std::size_t burn_in, RngStream& rng) {
    PriorSpec spec = base_prior;
    spec.mode_count = mesh;
    BuiltTarget built =
        dataset ? build_target_from_dataset(spec, *dataset, false)
                : BuiltTarget{spec.build(), prior_target(), std::nullopt};

    SamplerSpec sampler;
    sampler.kind = sweep.proposal_kind;
    sampler.theta = sweep.theta;
    sampler.precond = sweep.precond;
    if (sweep.proposal_kind == "pcn")
      sampler.beta = scale;
    else
      sampler.delta = scale;

    ChainState chain = make_chain_state(built.prior.sample(rng), built.target);
    const ProposalConfig proposal = sampler.proposal();
    std::size_t accepted = 0;
    for (std::size_t s = 0; s < burn_in + steps; ++s) {
      const bool ok =
          mh_step(chain, built.target, built.prior, proposal, rng).accepted;
      if (s >= burn_in && ok) ++accepted;
    }
    return static_cast<double>(accepted) / static_cast<double>(steps);
  };

  const AcceptanceCurve curve =
      acceptance_sweep(cell, sweep.mesh_sizes, sweep.scale_grid,
                       sweep.steps_per_cell, sweep.burn_in, config.seed);
  write_file(out_dir / "acceptance.csv", acceptance_csv(curve));
  manifest["cells"] = curve.mesh_sizes.size() * curve.scale_grid.size();
}

void run_tune(const ExperimentConfig& config, const fs::path& out_dir,
              nlohmann::json& manifest) {
  const bool needs_grad =
      config.sampler.kind == "cnl" || config.sampler.kind == "pcnl";
  const BuiltTarget built =
      build_target(config.prior, config.target, needs_grad);
  RngStream rng = RngStream::derive(config.seed, 1);

  SamplerSpec working = config.sampler;
  const TuneResult result = tune_sampler(working, built, config.tune, rng);

  nlohmann::json tuned;
  tuned["kind"] = working.kind;
  tuned["scale"] = result.scale;
  if (pcn_scale_family(working.kind)) {
    tuned["beta"] = result.scale;
    tuned["delta"] = delta_from_beta(result.scale);
  } else {
    tuned["delta"] = result.scale;
  }
  tuned["final_acceptance"] = result.final_acceptance;
  tuned["saturated"] = result.saturated;
  tuned["bursts"] = result.bursts;
  tuned["target_acceptance"] = config.tune.target_acceptance;
  write_file(out_dir / "tune.json", tuned.dump(2) + "\n");
  manifest["tune"] = tuned;
}

void run_compare(const ExperimentConfig& config, const fs::path& out_dir,
                 nlohmann::json& manifest) {
  const std::size_t burn = config.effective_burn_in();
  std::ostringstream table;
  table << "algorithm,delta,mean_acceptance,iact,steps\n";
  nlohmann::json info = nlohmann::json::array();

  for (std::size_t a = 0; a < config.compare_samplers.size(); ++a) {
    SamplerSpec sampler = config.compare_samplers[a];
    const bool needs_grad = sampler.kind == "cnl" || sampler.kind == "pcnl";
    const BuiltTarget built =
        build_target(config.prior, config.target, needs_grad);
    RngStream rng = RngStream::derive(config.seed, 100 + a);

    const bool tunable = sampler.kind != "mwg" && sampler.kind != "indep";
    double tuned_scale = 0.0;
    if (config.compare_tune && tunable) {
      tune_sampler(sampler, built, config.tune, rng);
      tuned_scale = sampler.scalar_step();
    } else if (tunable) {
      tuned_scale = sampler.scalar_step();
    }

    const ChainRunOutput chain =
        run_chain(built.prior, built.target, sampler, config.observables,
                  config.length, burn, rng);
    const SummaryRow row = summarize(chain.traces[0], config.max_lag);
    table << sampler.label() << ',' << format_double(tuned_scale) << ','
          << format_double(chain.mean_acceptance) << ','
          << format_double(row.iact) << ',' << config.length << '\n';
    info.push_back({{"algorithm", sampler.label()},
                    {"delta", tuned_scale},
                    {"mean_acceptance", chain.mean_acceptance},
                    {"iact", row.iact}});
    write_file(out_dir / ("trace_" + sanitize(sampler.label()) + ".csv"),
               trace_csv(chain.traces[0], chain.accepted, burn, config.thin));
  }
  write_file(out_dir / "compare.csv", table.str());
  manifest["compare"] = info;
}

void run_twin(const ExperimentConfig& config, const fs::path& out_dir,
              nlohmann::json& manifest) {
  const TwinSpec& twin = config.twin.value();
  Dataset dataset;
  if (twin.model == "density") {
    dataset = make_density_twin(twin.true_density, config.prior.ell,
                                twin.observation_count, twin.quad_points,
                                config.seed);
  } else if (twin.model == "linear_gaussian") {
    const SpectralPrior prior = config.prior.build();
    std::vector<double> weights = twin.weights;
    if (weights.empty()) weights.assign(prior.mode_count(), 1.0);
    dataset = make_linear_gaussian_twin(prior, std::move(weights),
                                        twin.noise_sigma, config.seed);
  } else if (twin.model == "darcy") {
    const SpectralPrior prior = config.prior.build();
    DarcyProblem problem;
    problem.grid_size = twin.grid_size;
    problem.source_constant = twin.source_constant;
    problem.boundary_value = twin.boundary_value;
    problem.measurement_points = twin.measurement_points;
    if (problem.measurement_points.empty())
      problem.measurement_points = {{0.5, 0.5}};
    problem.noise_sigma = twin.noise_sigma;
    dataset =
        make_darcy_twin(prior, std::move(problem), twin.truth, config.seed);
  } else if (twin.model == "stokes") {
    PriorSpec prior_spec = config.prior;
    prior_spec.basis = "stokes";
    prior_spec.viscosity = twin.viscosity;
    prior_spec.mode_count = twin.mode_cutoff;
    const SpectralPrior prior = prior_spec.build();
    StokesProblem problem;
    problem.viscosity = twin.viscosity;
    problem.mode_cutoff = twin.mode_cutoff;
    problem.obs_kind = twin.obs_kind == "lagrangian"
                           ? StokesProblem::ObsKind::kLagrangian
                           : StokesProblem::ObsKind::kEulerian;
    problem.obs_times = twin.obs_times;
    if (problem.obs_times.empty()) problem.obs_times = {0.1};
    problem.stations = station_grid(twin.station_side);
    problem.euler_dt = twin.euler_dt;
    problem.noise_sigma = twin.noise_sigma;
    dataset = make_stokes_twin(prior, std::move(problem), config.seed);
  } else {
    throw std::invalid_argument("twin-generate: unknown model " + twin.model);
  }

  save_dataset(dataset, (out_dir / twin.output_name).string());
  manifest["dataset"] = twin.output_name;

  if (dataset.truth_z) {
    PriorSpec prior_spec = config.prior;
    if (dataset.model == "stokes") {
      prior_spec.basis = "stokes";
      prior_spec.viscosity = twin.viscosity;
      prior_spec.mode_count = twin.mode_cutoff;
    }
    const BuiltTarget built =
        build_target_from_dataset(prior_spec, dataset, false);
    CoefficientState truth;
    truth.z = *dataset.truth_z;
    manifest["phi_at_truth"] = built.target.potential(truth);
  }
}

void run_validate(const ExperimentConfig& config, const fs::path& out_dir,
                  nlohmann::json& manifest) {
  const SuiteResult result = run_suite(config.validate_suite, config.seed);
  nlohmann::json report;
  report["suite"] = result.suite;
  report["pass"] = result.pass;
  report["stats"] = result.stats;
  write_file(out_dir / "report.json", report.dump(2) + "\n");
  manifest["validate"] = report;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  try {
    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);
    nlohmann::json manifest = base_manifest(config);

    switch (config.kind) {
      case ExperimentKind::kSample:
        run_sample(config, out_dir, manifest);
        break;
      case ExperimentKind::kSweep:
        run_sweep(config, out_dir, manifest);
        break;
      case ExperimentKind::kTune:
        run_tune(config, out_dir, manifest);
        break;
      case ExperimentKind::kCompare:
        run_compare(config, out_dir, manifest);
        break;
      case ExperimentKind::kTwinGenerate:
        run_twin(config, out_dir, manifest);
        break;
      case ExperimentKind::kValidate:
        run_validate(config, out_dir, manifest);
        break;
    }

    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    const auto stop = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(stop - start).count();
    write_file(out_dir / "timing.txt",
               "wall_time_seconds " + format_double(secs) + "\n");
    return {0, "ok"};
  } catch (const std::invalid_argument& e) {
    return {2, e.what()};
  } catch (const std::exception& e) {
    return {3, e.what()};
  }
}

}  // namespace fsmcmc
