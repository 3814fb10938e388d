#pragma once

#include <array>
#include <span>
#include <vector>

#include "fsmcmc/spectral_prior.hpp"
#include "fsmcmc/target.hpp"

namespace fsmcmc {

/// Stokes-flow data assimilation on the unit torus: infer the initial
/// velocity field from Eulerian point observations or Lagrangian tracer
/// paths. The velocity lives on divergence-free Fourier modes with
/// wavevectors k = 2 pi (p, q); heat-kernel decay exp(-nu |k|^2 t) evolves
/// each mode exactly.
struct StokesProblem {
  enum class ObsKind { kEulerian, kLagrangian };

  double viscosity = 0.1;
  std::size_t mode_cutoff = 100;
  ObsKind obs_kind = ObsKind::kEulerian;
  std::vector<double> obs_times;
  std::vector<std::array<double, 2>> stations;  // stations or tracer starts
  double euler_dt = 0.01;
  double noise_sigma = 0.01;
  std::vector<double> data;  // flattened (time, station, component)

  std::size_t obs_dim() const { return 2 * obs_times.size() * stations.size(); }
  void validate() const;
};

/// Field coefficients xi_i = lambda_i z_i over active modes (0 otherwise).
std::vector<double> field_coefficients(const SpectralPrior& prior,
                                       const CoefficientState& state);

/// Each mode multiplied by exp(-nu |k|^2 t); exact, no time stepping.
std::vector<double> stokes_evolve(std::span<const double> coeffs,
                                  const std::vector<SpectralPrior::Mode2d>& modes,
                                  double nu, double t);

/// Velocity at a point from divergence-free mode coefficients.
std::array<double, 2> stokes_velocity(
    std::span<const double> coeffs,
    const std::vector<SpectralPrior::Mode2d>& modes, double x1, double x2);

/// G(u) for Eulerian data: velocity components at every (station, time).
std::vector<double> eulerian_forward(const CoefficientState& state,
                                     const StokesProblem& problem,
                                     const SpectralPrior& prior);

double eulerian_potential(const CoefficientState& state,
                          const StokesProblem& problem,
                          const SpectralPrior& prior);

/// Forward-Euler tracer integration with the exact spectral velocity;
/// positions wrapped onto [0,1)^2. Returns positions[time][tracer].
std::vector<std::vector<std::array<double, 2>>> lagrangian_trace(
    const CoefficientState& state, const StokesProblem& problem,
    const SpectralPrior& prior);

std::vector<double> lagrangian_forward(const CoefficientState& state,
                                       const StokesProblem& problem,
                                       const SpectralPrior& prior);

double lagrangian_potential(const CoefficientState& state,
                            const StokesProblem& problem,
                            const SpectralPrior& prior);

std::vector<double> stokes_forward(const CoefficientState& state,
                                   const StokesProblem& problem,
                                   const SpectralPrior& prior);

Target make_stokes_target(const StokesProblem& problem,
                          const SpectralPrior& prior);

/// Evenly spaced side x side station grid at cell centers.
std::vector<std::array<double, 2>> station_grid(std::size_t side);

}  // namespace fsmcmc
