#include "fsmcmc/models/stokes.hpp"

#include <cmath>
#include <stdexcept>

namespace fsmcmc {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double gaussian_misfit_value(std::span<const double> forward,
                             std::span<const double> data, double sigma) {
  if (forward.size() != data.size())
    throw std::invalid_argument("stokes potential: data size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < forward.size(); ++i) {
    const double r = data[i] - forward[i];
    acc += r * r;
  }
  if (acc == 0.0) return 0.0;
  if (!(sigma > 0.0))
    throw std::domain_error("stokes potential: zero noise, nonzero residual");
  return 0.5 * acc / (sigma * sigma);
}

double wrap_unit(double x) {
  const double w = x - std::floor(x);
  return w < 1.0 ? w : 0.0;
}

}  // namespace

void StokesProblem::validate() const {
  if (!(viscosity > 0.0))
    throw std::invalid_argument("StokesProblem: viscosity must be > 0");
  if (!(euler_dt > 0.0))
    throw std::invalid_argument("StokesProblem: euler_dt must be > 0");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("StokesProblem: noise_sigma must be >= 0");
  if (obs_times.empty() || stations.empty())
    throw std::invalid_argument("StokesProblem: needs times and stations");
  for (std::size_t k = 0; k < obs_times.size(); ++k) {
    if (obs_times[k] < 0.0)
      throw std::invalid_argument("StokesProblem: negative observation time");
    if (k > 0 && obs_times[k] <= obs_times[k - 1])
      throw std::invalid_argument(
          "StokesProblem: observation times must increase");
  }
  if (!data.empty() && data.size() != obs_dim())
    throw std::invalid_argument("StokesProblem: data size mismatch");
}

std::vector<double> field_coefficients(const SpectralPrior& prior,
                                       const CoefficientState& state) {
  std::vector<double> xi(state.z.size(), 0.0);
  const std::size_t n = std::min(state.z.size(), prior.mode_count());
  for (std::size_t i = 0; i < n; ++i)
    if (state.is_active(i)) xi[i] = prior.mode_std(i) * state.z[i];
  return xi;
}

// Heat-kernel factor exp(-nu |k|^2 t) with |k|^2 = p^2 + q^2 in index
// units; the spatial frequency 2 pi is absorbed into nu.
std::vector<double> stokes_evolve(std::span<const double> coeffs,
                                  const std::vector<SpectralPrior::Mode2d>& modes,
                                  double nu, double t) {
  if (t < 0.0) throw std::invalid_argument("stokes_evolve: t must be >= 0");
  if (coeffs.size() > modes.size())
    throw std::invalid_argument("stokes_evolve: more coefficients than modes");
  std::vector<double> out(coeffs.begin(), coeffs.end());
  const double c = nu * t;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& m = modes[i];
    out[i] *= std::exp(-c * static_cast<double>(m.p * m.p + m.q * m.q));
  }
  return out;
}

std::array<double, 2> stokes_velocity(
    std::span<const double> coeffs,
    const std::vector<SpectralPrior::Mode2d>& modes, double x1, double x2) {
  double v1 = 0.0;
  double v2 = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double c = coeffs[i];
    if (c == 0.0) continue;
    const auto& m = modes[i];
    const double norm = std::sqrt(static_cast<double>(m.p * m.p + m.q * m.q));
    const double arg = kTwoPi * (m.p * x1 + m.q * x2);
    const double wave =
        std::sqrt(2.0) * (m.sine ? std::sin(arg) : std::cos(arg));
    // Divergence-free direction: k_perp / |k| = (-q, p) / sqrt(p^2+q^2).
    const double amp = c * wave / norm;
    v1 += amp * static_cast<double>(-m.q);
    v2 += amp * static_cast<double>(m.p);
  }
  return {v1, v2};
}

std::vector<double> eulerian_forward(const CoefficientState& state,
                                     const StokesProblem& problem,
                                     const SpectralPrior& prior) {
  problem.validate();
  const auto& modes = prior.modes2d();
  const std::vector<double> xi = field_coefficients(prior, state);
  std::vector<double> out;
  out.reserve(problem.obs_dim());
  for (const double t : problem.obs_times) {
    const std::vector<double> at_t =
        stokes_evolve(xi, modes, problem.viscosity, t);
    for (const auto& x : problem.stations) {
      const auto v = stokes_velocity(at_t, modes, x[0], x[1]);
      out.push_back(v[0]);
      out.push_back(v[1]);
    }
  }
  return out;
}

double eulerian_potential(const CoefficientState& state,
                          const StokesProblem& problem,
                          const SpectralPrior& prior) {
  if (problem.obs_kind != StokesProblem::ObsKind::kEulerian)
    throw std::invalid_argument("eulerian_potential: problem is Lagrangian");
  return gaussian_misfit_value(eulerian_forward(state, problem, prior),
                               problem.data, problem.noise_sigma);
}

std::vector<std::vector<std::array<double, 2>>> lagrangian_trace(
    const CoefficientState& state, const StokesProblem& problem,
    const SpectralPrior& prior) {
  problem.validate();
  const auto& modes = prior.modes2d();
  std::vector<double> coeffs = field_coefficients(prior, state);

  std::vector<std::array<double, 2>> pos = problem.stations;
  for (auto& p : pos) p = {wrap_unit(p[0]), wrap_unit(p[1])};

  std::vector<std::vector<std::array<double, 2>>> recorded;
  recorded.reserve(problem.obs_times.size());
  double t = 0.0;
  for (const double t_obs : problem.obs_times) {
    while (t < t_obs - 1e-12) {
      const double dt = std::min(problem.euler_dt, t_obs - t);
      for (auto& p : pos) {
        const auto v = stokes_velocity(coeffs, modes, p[0], p[1]);
        p[0] = wrap_unit(p[0] + dt * v[0]);
        p[1] = wrap_unit(p[1] + dt * v[1]);
      }
      coeffs = stokes_evolve(coeffs, modes, problem.viscosity, dt);
      t += dt;
    }
    recorded.push_back(pos);
  }
  return recorded;
}

std::vector<double> lagrangian_forward(const CoefficientState& state,
                                       const StokesProblem& problem,
                                       const SpectralPrior& prior) {
  const auto paths = lagrangian_trace(state, problem, prior);
  std::vector<double> out;
  out.reserve(problem.obs_dim());
  for (const auto& at_t : paths) {
    for (const auto& p : at_t) {
      out.push_back(p[0]);
      out.push_back(p[1]);
    }
  }
  return out;
}

double lagrangian_potential(const CoefficientState& state,
                            const StokesProblem& problem,
                            const SpectralPrior& prior) {
  if (problem.obs_kind != StokesProblem::ObsKind::kLagrangian)
    throw std::invalid_argument("lagrangian_potential: problem is Eulerian");
  return gaussian_misfit_value(lagrangian_forward(state, problem, prior),
                               problem.data, problem.noise_sigma);
}

std::vector<double> stokes_forward(const CoefficientState& state,
                                   const StokesProblem& problem,
                                   const SpectralPrior& prior) {
  return problem.obs_kind == StokesProblem::ObsKind::kEulerian
             ? eulerian_forward(state, problem, prior)
             : lagrangian_forward(state, problem, prior);
}

Target make_stokes_target(const StokesProblem& problem,
                          const SpectralPrior& prior) {
  problem.validate();
  if (problem.data.empty())
    throw std::invalid_argument("make_stokes_target: problem carries no data");
  if (!(problem.noise_sigma > 0.0))
    throw std::invalid_argument("make_stokes_target: noise_sigma must be > 0");
  Target t;
  t.potential = [problem, prior](const CoefficientState& s) {
    return problem.obs_kind == StokesProblem::ObsKind::kEulerian
               ? eulerian_potential(s, problem, prior)
               : lagrangian_potential(s, problem, prior);
  };
  GaussianMisfit misfit;
  misfit.noise_sigma = problem.noise_sigma;
  misfit.data_dim = problem.obs_dim();
  misfit.residual = [problem, prior](const CoefficientState& s) {
    std::vector<double> r = stokes_forward(s, problem, prior);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = problem.data[i] - r[i];
    return r;
  };
  t.misfit = misfit;
  return t;
}

std::vector<std::array<double, 2>> station_grid(std::size_t side) {
  if (side == 0) throw std::invalid_argument("station_grid: side must be > 0");
  std::vector<std::array<double, 2>> grid;
  grid.reserve(side * side);
  const double step = 1.0 / static_cast<double>(side);
  for (std::size_t j = 0; j < side; ++j)
    for (std::size_t i = 0; i < side; ++i)
      grid.push_back({(static_cast<double>(i) + 0.5) * step,
                      (static_cast<double>(j) + 0.5) * step});
  return grid;
}

}  // namespace fsmcmc
