#include "fsmcmc/models/linear_gaussian.hpp"

#include <stdexcept>

namespace fsmcmc {

void LinearGaussianTarget::validate(std::size_t mode_count) const {
  if (weights.size() != data.size())
    throw std::invalid_argument(
        "LinearGaussianTarget: weights/data size mismatch");
  if (weights.size() > mode_count)
    throw std::invalid_argument(
        "LinearGaussianTarget: more observed modes than mode_count");
  if (noise_sigma < 0.0)
    throw std::invalid_argument(
        "LinearGaussianTarget: noise_sigma must be >= 0");
}

namespace {

std::vector<double> residual(const CoefficientState& state,
                             const LinearGaussianTarget& target,
                             const SpectralPrior& prior) {
  std::vector<double> r(target.data.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double xi =
        state.is_active(i) ? prior.mode_std(i) * state.z[i] : 0.0;
    r[i] = target.data[i] - target.weights[i] * xi;
  }
  return r;
}

}  // namespace

double linear_gaussian_potential(const CoefficientState& state,
                                 const LinearGaussianTarget& target,
                                 const SpectralPrior& prior) {
  target.validate(prior.mode_count());
  const std::vector<double> r = residual(state, target, prior);
  double acc = 0.0;
  for (const double ri : r) acc += ri * ri;
  if (acc == 0.0) return 0.0;
  if (!(target.noise_sigma > 0.0))
    throw std::domain_error(
        "linear_gaussian_potential: zero noise, nonzero residual");
  return 0.5 * acc / (target.noise_sigma * target.noise_sigma);
}

std::vector<double> linear_gaussian_gradient(const CoefficientState& state,
                                             const LinearGaussianTarget& target,
                                             const SpectralPrior& prior) {
  target.validate(prior.mode_count());
  if (!(target.noise_sigma > 0.0))
    throw std::domain_error("linear_gaussian_gradient: zero noise");
  const std::vector<double> r = residual(state, target, prior);
  const double inv_var = 1.0 / (target.noise_sigma * target.noise_sigma);
  std::vector<double> grad(state.z.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!state.is_active(i)) continue;
    grad[i] = -target.weights[i] * prior.mode_std(i) * r[i] * inv_var;
  }
  return grad;
}

std::vector<ModePosterior> posterior_oracle(const LinearGaussianTarget& target,
                                            const SpectralPrior& prior) {
  target.validate(prior.mode_count());
  if (!(target.noise_sigma > 0.0))
    throw std::domain_error("posterior_oracle: zero noise");
  const double inv_var = 1.0 / (target.noise_sigma * target.noise_sigma);
  std::vector<ModePosterior> post(prior.mode_count());
  for (std::size_t i = 0; i < target.weights.size(); ++i) {
    const double hl = target.weights[i] * prior.mode_std(i);
    post[i].variance = 1.0 / (1.0 + hl * hl * inv_var);
    post[i].mean = post[i].variance * hl * target.data[i] * inv_var;
  }
  return post;
}

Target make_linear_gaussian_target(const LinearGaussianTarget& target,
                                   const SpectralPrior& prior) {
  target.validate(prior.mode_count());
  Target t;
  t.potential = [target, prior](const CoefficientState& s) {
    return linear_gaussian_potential(s, target, prior);
  };
  t.gradient = [target, prior](const CoefficientState& s) {
    return linear_gaussian_gradient(s, target, prior);
  };
  GaussianMisfit misfit;
  misfit.noise_sigma = target.noise_sigma;
  misfit.data_dim = target.data.size();
  misfit.residual = [target, prior](const CoefficientState& s) {
    return residual(s, target, prior);
  };
  t.misfit = misfit;
  return t;
}

}  // namespace fsmcmc
