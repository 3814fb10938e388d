#pragma once

#include <memory>
#include <vector>

#include "fsmcmc/spectral_prior.hpp"
#include "fsmcmc/target.hpp"

namespace fsmcmc {

/// Nonparametric density estimation data on [-ell, ell]. The density is
/// rho(x) = exp(u(x)) / int exp(u), so the potential is
/// Phi(u) = -sum_i [u(y_i) - ln Z(u)].
struct DensityData {
  std::vector<double> observations;
  double ell = 10.0;
  std::size_t quad_points = 1025;  // composite trapezoid on a uniform grid

  void validate() const;
};

/// Density-estimation target with the quadrature grid and basis values
/// cached at construction. Copies share the cache and are safe to use
/// read-only across chains.
class DensityTarget {
 public:
  DensityTarget(const SpectralPrior& prior, DensityData data);

  double potential(const CoefficientState& state) const;
  /// Analytic gradient in whitened coordinates:
  /// dPhi/dz_i = lambda_i [d_y <phi_i>_rho(u) - sum_j phi_i(y_j)].
  std::vector<double> gradient(const CoefficientState& state) const;

  Target as_target() const;

  const std::vector<double>& grid() const;
  const std::vector<double>& quad_weights() const;
  const DensityData& data() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

double density_potential(const CoefficientState& state,
                         const DensityData& data, const SpectralPrior& prior);
std::vector<double> density_gradient(const CoefficientState& state,
                                     const DensityData& data,
                                     const SpectralPrior& prior);

/// True test densities: rho1 is the two-component normal mixture at +/-3,
/// rho2 is exp(sin(15 pi x / ell)), both restricted to (-ell, ell).
double rho1_unnormalized(double x);
double rho2_unnormalized(double x, double ell);

/// i.i.d. draws via inverse-CDF on a quadrature grid.
std::vector<double> sample_from_density(
    const std::function<double(double)>& unnormalized, double ell,
    std::size_t count, RngStream& rng, std::size_t grid_points = 4097);

}  // namespace fsmcmc
