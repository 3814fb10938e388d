#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "fsmcmc/models/darcy.hpp"
#include "fsmcmc/models/density.hpp"
#include "fsmcmc/models/linear_gaussian.hpp"
#include "fsmcmc/models/stokes.hpp"

namespace fsmcmc {

/// A serialized problem plus its observations. Twin-generated datasets
/// embed the truth (whitened coefficients or a named field) and the seed
/// used for the noise, so every experiment is reproducible from the file.
struct Dataset {
  std::string model;  // density | linear_gaussian | darcy | stokes
  std::optional<DensityData> density;
  std::optional<LinearGaussianTarget> linear;
  std::optional<DarcyProblem> darcy;
  std::optional<StokesProblem> stokes;

  std::optional<std::vector<double>> truth_z;
  std::optional<std::string> truth_name;  // rho1 | rho2 | case1 | case2
  std::optional<std::uint64_t> twin_seed;
};

nlohmann::json dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const nlohmann::json& doc);
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& dataset, const std::string& path);

/// Observations drawn from a named true density (rho1 or rho2) by
/// inverse-CDF sampling.
Dataset make_density_twin(const std::string& true_density, double ell,
                          std::size_t observation_count,
                          std::size_t quad_points, std::uint64_t seed);

/// Truth drawn from the prior; y = G(truth) + sigma * noise.
Dataset make_linear_gaussian_twin(const SpectralPrior& prior,
                                  std::vector<double> weights,
                                  double noise_sigma, std::uint64_t seed);

/// truth_kind: "prior" (draw from the prior), "case1" (constant
/// kappa = 1/10) or "case2" (the smooth variable-permeability field).
Dataset make_darcy_twin(const SpectralPrior& prior, DarcyProblem problem,
                        const std::string& truth_kind, std::uint64_t seed);

Dataset make_stokes_twin(const SpectralPrior& prior, StokesProblem problem,
                         std::uint64_t seed);

/// Case-2 log permeability from the subsurface study.
double darcy_case2_log_perm(double x1, double x2);

}  // namespace fsmcmc
