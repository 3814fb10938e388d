#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fsmcmc/spectral_prior.hpp"

namespace fsmcmc {

/// Gaussian-likelihood structure: residual(u) = y - G(u). Enables the
/// conjugate Gamma precision update and the marginalized potential.
struct GaussianMisfit {
  std::function<std::vector<double>(const CoefficientState&)> residual;
  double noise_sigma = 1.0;
  std::size_t data_dim = 0;
};

/// Gamma(shape alpha_sigma, rate beta_sigma) hyperprior on the noise
/// precision tau = sigma^-2.
struct PrecisionHyperprior {
  double alpha_sigma = 1e-4;
  double beta_sigma = 1e-4;

  void validate() const {
    if (!(alpha_sigma > 0.0) || !(beta_sigma > 0.0))
      throw std::invalid_argument(
          "PrecisionHyperprior: alpha_sigma and beta_sigma must be > 0");
  }
};

/// Potential Phi defining d(posterior)/d(prior) = exp(-Phi), with an
/// optional gradient in whitened coordinates (dPhi/dz_i) and optional
/// Gaussian-likelihood structure.
struct Target {
  std::function<double(const CoefficientState&)> potential;
  std::function<std::vector<double>(const CoefficientState&)> gradient;
  std::optional<GaussianMisfit> misfit;

  bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// Phi identically zero; the chain then targets the prior.
Target prior_target();

/// Central finite-difference gradient of target.potential over the active
/// modes (step h per whitened coordinate); inactive entries are zero.
std::vector<double> finite_difference_gradient(const Target& target,
                                               const CoefficientState& state,
                                               double h = 1e-5);

/// Wraps a target with the finite-difference fallback gradient.
Target with_fd_gradient(Target target, double h = 1e-5);

}  // namespace fsmcmc
