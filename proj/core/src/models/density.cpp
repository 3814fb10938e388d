#include "fsmcmc/models/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fsmcmc {

void DensityData::validate() const {
  if (!(ell > 0.0))
    throw std::invalid_argument("DensityData: ell must be > 0");
  if (quad_points < 3)
    throw std::invalid_argument("DensityData: need at least 3 grid points");
  for (const double y : observations)
    if (std::abs(y) > ell)
      throw std::out_of_range("DensityData: observation outside [-ell, ell]");
}

struct DensityTarget::Impl {
  DensityData data;
  std::vector<double> grid;
  std::vector<double> weights;       // trapezoid weights, sum = 2 ell
  std::vector<double> lambda;        // per-mode std
  std::vector<double> basis_grid;    // [mode * n_grid + g] = phi_i(x_g)
  std::vector<double> basis_obs_sum; // sum over observations of phi_i(y_j),
                                     // by the same grid interpolation
  std::size_t n_modes = 0;

  double interp(const std::vector<double>& values, double x) const {
    const double h = 2.0 * data.ell / static_cast<double>(grid.size() - 1);
    const double s = (x + data.ell) / h;
    const auto cell = std::min(static_cast<std::size_t>(std::max(s, 0.0)),
                               grid.size() - 2);
    const double t = s - static_cast<double>(cell);
    return (1.0 - t) * values[cell] + t * values[cell + 1];
  }

  std::vector<double> field_on_grid(const CoefficientState& state) const {
    std::vector<double> u(grid.size(), 0.0);
    for (std::size_t i = 0; i < n_modes && i < state.z.size(); ++i) {
      if (!state.is_active(i)) continue;
      const double c = lambda[i] * state.z[i];
      if (c == 0.0) continue;
      const double* row = &basis_grid[i * grid.size()];
      for (std::size_t g = 0; g < grid.size(); ++g) u[g] += c * row[g];
    }
    return u;
  }
};

DensityTarget::DensityTarget(const SpectralPrior& prior, DensityData data) {
  data.validate();
  if (prior.basis() != BasisKind::kFourier1d)
    throw std::invalid_argument("DensityTarget: needs a fourier1d prior");
  if (prior.half_length() != data.ell)
    throw std::invalid_argument(
        "DensityTarget: prior half-length differs from data ell");

  auto impl = std::make_shared<Impl>();
  impl->data = std::move(data);
  const std::size_t n = impl->data.quad_points;
  const double ell = impl->data.ell;
  const double h = 2.0 * ell / static_cast<double>(n - 1);
  impl->grid.resize(n);
  impl->weights.assign(n, h);
  impl->weights.front() = impl->weights.back() = 0.5 * h;
  for (std::size_t g = 0; g < n; ++g)
    impl->grid[g] = -ell + h * static_cast<double>(g);

  impl->n_modes = prior.mode_count();
  impl->lambda = prior.mode_stds();
  impl->basis_grid.resize(impl->n_modes * n);
  for (std::size_t i = 0; i < impl->n_modes; ++i)
    for (std::size_t g = 0; g < n; ++g)
      impl->basis_grid[i * n + g] = prior.basis_value(i, impl->grid[g]);

  impl->basis_obs_sum.assign(impl->n_modes, 0.0);
  for (std::size_t i = 0; i < impl->n_modes; ++i) {
    std::vector<double> row(impl->basis_grid.begin() + i * n,
                            impl->basis_grid.begin() + (i + 1) * n);
    for (const double y : impl->data.observations)
      impl->basis_obs_sum[i] += impl->interp(row, y);
  }
  impl_ = std::move(impl);
}

double DensityTarget::potential(const CoefficientState& state) const {
  const auto& im = *impl_;
  const std::vector<double> u = im.field_on_grid(state);
  const double peak = *std::max_element(u.begin(), u.end());
  double z = 0.0;
  for (std::size_t g = 0; g < u.size(); ++g)
    z += im.weights[g] * std::exp(u[g] - peak);
  const double log_z = peak + std::log(z);

  double phi = 0.0;
  for (const double y : im.data.observations)
    phi -= im.interp(u, y) - log_z;
  return phi;
}

std::vector<double> DensityTarget::gradient(
    const CoefficientState& state) const {
  const auto& im = *impl_;
  const std::size_t n = im.grid.size();
  const std::vector<double> u = im.field_on_grid(state);
  const double peak = *std::max_element(u.begin(), u.end());
  std::vector<double> rho(n);
  double z = 0.0;
  for (std::size_t g = 0; g < n; ++g) {
    rho[g] = im.weights[g] * std::exp(u[g] - peak);
    z += rho[g];
  }
  for (auto& r : rho) r /= z;  // quadrature expectation weights under rho(u)

  const double d_y = static_cast<double>(im.data.observations.size());
  std::vector<double> grad(state.z.size(), 0.0);
  for (std::size_t i = 0; i < im.n_modes && i < state.z.size(); ++i) {
    if (!state.is_active(i)) continue;
    const double* row = &im.basis_grid[i * n];
    double expectation = 0.0;
    for (std::size_t g = 0; g < n; ++g) expectation += rho[g] * row[g];
    grad[i] = im.lambda[i] * (d_y * expectation - im.basis_obs_sum[i]);
  }
  return grad;
}

Target DensityTarget::as_target() const {
  Target t;
  DensityTarget self = *this;
  t.potential = [self](const CoefficientState& s) { return self.potential(s); };
  t.gradient = [self](const CoefficientState& s) { return self.gradient(s); };
  return t;
}

const std::vector<double>& DensityTarget::grid() const { return impl_->grid; }
const std::vector<double>& DensityTarget::quad_weights() const {
  return impl_->weights;
}
const DensityData& DensityTarget::data() const { return impl_->data; }

double density_potential(const CoefficientState& state,
                         const DensityData& data, const SpectralPrior& prior) {
  return DensityTarget(prior, data).potential(state);
}

std::vector<double> density_gradient(const CoefficientState& state,
                                     const DensityData& data,
                                     const SpectralPrior& prior) {
  return DensityTarget(prior, data).gradient(state);
}

double rho1_unnormalized(double x) {
  return std::exp(-0.5 * (x + 3.0) * (x + 3.0)) +
         std::exp(-0.5 * (x - 3.0) * (x - 3.0));
}

double rho2_unnormalized(double x, double ell) {
  return std::exp(std::sin(15.0 * M_PI * x / ell));
}

std::vector<double> sample_from_density(
    const std::function<double(double)>& unnormalized, double ell,
    std::size_t count, RngStream& rng, std::size_t grid_points) {
  if (grid_points < 3)
    throw std::invalid_argument("sample_from_density: grid too small");
  const double h = 2.0 * ell / static_cast<double>(grid_points - 1);
  std::vector<double> x(grid_points);
  std::vector<double> cdf(grid_points, 0.0);
  for (std::size_t g = 0; g < grid_points; ++g)
    x[g] = -ell + h * static_cast<double>(g);
  for (std::size_t g = 1; g < grid_points; ++g) {
    const double f0 = unnormalized(x[g - 1]);
    const double f1 = unnormalized(x[g]);
    cdf[g] = cdf[g - 1] + 0.5 * h * (f0 + f1);
  }
  const double total = cdf.back();
  if (!(total > 0.0))
    throw std::runtime_error("sample_from_density: density integrates to 0");

  std::vector<double> draws(count);
  for (auto& d : draws) {
    const double target = rng.uniform() * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    const auto hi = std::max<std::size_t>(1, it - cdf.begin());
    const double span = cdf[hi] - cdf[hi - 1];
    const double t = span > 0.0 ? (target - cdf[hi - 1]) / span : 0.5;
    d = x[hi - 1] + t * h;
  }
  return draws;
}

}  // namespace fsmcmc
