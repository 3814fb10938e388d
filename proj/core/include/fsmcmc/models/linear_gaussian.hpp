#pragma once

#include <vector>

#include "fsmcmc/spectral_prior.hpp"
#include "fsmcmc/target.hpp"

namespace fsmcmc {

/// Reference target with a closed-form posterior: y_i = h_i xi_i + noise
/// for the first m modes, xi_i = lambda_i z_i.
struct LinearGaussianTarget {
  std::vector<double> weights;  // h_i, one per observed mode
  std::vector<double> data;     // y_i
  double noise_sigma = 1.0;

  void validate(std::size_t mode_count) const;
};

double linear_gaussian_potential(const CoefficientState& state,
                                 const LinearGaussianTarget& target,
                                 const SpectralPrior& prior);

std::vector<double> linear_gaussian_gradient(const CoefficientState& state,
                                             const LinearGaussianTarget& target,
                                             const SpectralPrior& prior);

struct ModePosterior {
  double mean = 0.0;      // whitened coordinates
  double variance = 1.0;
};

/// Conjugate per-mode posterior in whitened coordinates:
/// variance (1 + h^2 lambda^2 / sigma^2)^-1, mean variance*h*lambda*y/sigma^2.
std::vector<ModePosterior> posterior_oracle(const LinearGaussianTarget& target,
                                            const SpectralPrior& prior);

/// Full Target with potential, analytic gradient and Gaussian misfit.
Target make_linear_gaussian_target(const LinearGaussianTarget& target,
                                   const SpectralPrior& prior);

}  // namespace fsmcmc
