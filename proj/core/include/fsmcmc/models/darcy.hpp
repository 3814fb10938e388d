#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fsmcmc/spectral_prior.hpp"
#include "fsmcmc/target.hpp"

namespace fsmcmc {

/// Groundwater head problem -div(exp(u) grad p) = g on [0,1]^2 with
/// Dirichlet boundary p = boundary_value. grid_size J counts interior
/// nodes per side (h = 1/(J+1)); the discrete system is J^2 x J^2 with
/// bandwidth J.
struct DarcyProblem {
  std::size_t grid_size = 32;
  double source_constant = 1.0;
  double boundary_value = 0.0;
  std::vector<std::array<double, 2>> measurement_points;
  double noise_sigma = 0.01;
  std::vector<double> data;  // y_j = p(x_j) + sigma eta_j

  void validate() const;
};

/// Head values at the interior nodes, row-major with the x1 index fastest.
struct DarcySolution {
  std::size_t grid_size = 0;
  double spacing = 0.0;
  double boundary_value = 0.0;
  std::vector<double> head;

  /// Bilinear interpolation on the full grid (boundary nodes included).
  double at(double x1, double x2) const;
  double interior(std::size_t i, std::size_t j) const {
    return head[(j - 1) * grid_size + (i - 1)];
  }
};

/// Five-point finite differences, permeability exp(u) evaluated at the
/// cell-face midpoints, solved by a banded Cholesky factorization.
DarcySolution darcy_solve(std::size_t grid_size,
                          const std::function<double(double, double)>& log_perm,
                          const std::function<double(double, double)>& source,
                          double boundary_value);

DarcySolution darcy_solve(const CoefficientState& state,
                          const DarcyProblem& problem,
                          const SpectralPrior& prior);

/// Forward observations p(x_j) for the problem's measurement points.
std::vector<double> darcy_forward(const CoefficientState& state,
                                  const DarcyProblem& problem,
                                  const SpectralPrior& prior);

double darcy_potential(const CoefficientState& state,
                       const DarcyProblem& problem,
                       const SpectralPrior& prior);

/// Target with Gaussian misfit; no analytic gradient (callers can attach
/// the finite-difference fallback).
Target make_darcy_target(const DarcyProblem& problem,
                         const SpectralPrior& prior);

}  // namespace fsmcmc
