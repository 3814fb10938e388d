#include "fsmcmc/models/darcy.hpp"

#include <cmath>
#include <stdexcept>

#include <lapacke.h>

namespace fsmcmc {

void DarcyProblem::validate() const {
  if (grid_size < 4)
    throw std::invalid_argument("DarcyProblem: grid_size must be >= 4");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("DarcyProblem: noise_sigma must be >= 0");
  for (const auto& p : measurement_points)
    if (p[0] <= 0.0 || p[0] >= 1.0 || p[1] <= 0.0 || p[1] >= 1.0)
      throw std::invalid_argument(
          "DarcyProblem: measurement points must be strictly inside [0,1]^2");
  if (!data.empty() && data.size() != measurement_points.size())
    throw std::invalid_argument("DarcyProblem: data/measurement size mismatch");
}

double DarcySolution::at(double x1, double x2) const {
  if (x1 < 0.0 || x1 > 1.0 || x2 < 0.0 || x2 > 1.0)
    throw std::domain_error("DarcySolution::at: point outside [0,1]^2");
  const std::size_t full = grid_size + 2;
  auto value = [&](std::size_t i, std::size_t j) {
    if (i == 0 || j == 0 || i == full - 1 || j == full - 1)
      return boundary_value;
    return interior(i, j);
  };
  const double s1 = x1 / spacing;
  const double s2 = x2 / spacing;
  const std::size_t i = std::min(static_cast<std::size_t>(s1), full - 2);
  const std::size_t j = std::min(static_cast<std::size_t>(s2), full - 2);
  const double t1 = s1 - static_cast<double>(i);
  const double t2 = s2 - static_cast<double>(j);
  return (1.0 - t1) * (1.0 - t2) * value(i, j) +
         t1 * (1.0 - t2) * value(i + 1, j) +
         (1.0 - t1) * t2 * value(i, j + 1) + t1 * t2 * value(i + 1, j + 1);
}

DarcySolution darcy_solve(std::size_t grid_size,
                          const std::function<double(double, double)>& log_perm,
                          const std::function<double(double, double)>& source,
                          double boundary_value) {
  if (grid_size < 1) throw std::invalid_argument("darcy_solve: empty grid");
  const std::size_t J = grid_size;
  const double h = 1.0 / static_cast<double>(J + 1);
  const double inv_h2 = 1.0 / (h * h);
  const auto n = static_cast<lapack_int>(J * J);
  const auto kd = static_cast<lapack_int>(J);
  const lapack_int ldab = kd + 1;

  auto kappa = [&](double x1, double x2) {
    const double u = log_perm(x1, x2);
    if (!std::isfinite(u))
      throw std::runtime_error("darcy_solve: non-finite log permeability");
    return std::exp(u);
  };

  // Faces shared between nodes: kx[i][j] sits at ((i+1/2)h, jh) for
  // i = 0..J, ky[i][j] at (ih, (j+1/2)h) for j = 0..J.
  std::vector<double> kx((J + 1) * J);
  std::vector<double> ky(J * (J + 1));
  for (std::size_t j = 1; j <= J; ++j)
    for (std::size_t i = 0; i <= J; ++i)
      kx[i + (J + 1) * (j - 1)] =
          kappa((static_cast<double>(i) + 0.5) * h, static_cast<double>(j) * h);
  for (std::size_t j = 0; j <= J; ++j)
    for (std::size_t i = 1; i <= J; ++i)
      ky[(i - 1) + J * j] =
          kappa(static_cast<double>(i) * h, (static_cast<double>(j) + 0.5) * h);

  // Symmetric banded storage, upper triangle, column-major:
  // ab[kd + r - c + c*ldab] = A(r, c).
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
  auto at = [&](lapack_int r, lapack_int c) -> double& {
    return ab[static_cast<std::size_t>(kd + r - c) +
              static_cast<std::size_t>(c) * ldab];
  };

  for (std::size_t j = 1; j <= J; ++j) {
    for (std::size_t i = 1; i <= J; ++i) {
      const auto row = static_cast<lapack_int>((j - 1) * J + (i - 1));
      const double kw = kx[(i - 1) + (J + 1) * (j - 1)];
      const double ke = kx[i + (J + 1) * (j - 1)];
      const double ks = ky[(i - 1) + J * (j - 1)];
      const double kn = ky[(i - 1) + J * j];
      at(row, row) = (kw + ke + ks + kn) * inv_h2;
      if (i > 1) at(row - 1, row) = -kw * inv_h2;
      if (j > 1) at(row - kd, row) = -ks * inv_h2;

      double b = source(static_cast<double>(i) * h, static_cast<double>(j) * h);
      if (i == 1) b += kw * boundary_value * inv_h2;
      if (i == J) b += ke * boundary_value * inv_h2;
      if (j == 1) b += ks * boundary_value * inv_h2;
      if (j == J) b += kn * boundary_value * inv_h2;
      rhs[static_cast<std::size_t>(row)] = b;
    }
  }

  const lapack_int info = LAPACKE_dpbsv(LAPACK_COL_MAJOR, 'U', n, kd, 1,
                                        ab.data(), ldab, rhs.data(), n);
  if (info != 0)
    throw std::runtime_error("darcy_solve: banded factorization failed");

  DarcySolution sol;
  sol.grid_size = J;
  sol.spacing = h;
  sol.boundary_value = boundary_value;
  sol.head = std::move(rhs);
  return sol;
}

DarcySolution darcy_solve(const CoefficientState& state,
                          const DarcyProblem& problem,
                          const SpectralPrior& prior) {
  problem.validate();
  return darcy_solve(
      problem.grid_size,
      [&](double x1, double x2) { return prior.synthesize_at(state, x1, x2); },
      [&](double, double) { return problem.source_constant; },
      problem.boundary_value);
}

std::vector<double> darcy_forward(const CoefficientState& state,
                                  const DarcyProblem& problem,
                                  const SpectralPrior& prior) {
  const DarcySolution sol = darcy_solve(state, problem, prior);
  std::vector<double> out(problem.measurement_points.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = sol.at(problem.measurement_points[k][0],
                    problem.measurement_points[k][1]);
  return out;
}

double darcy_potential(const CoefficientState& state,
                       const DarcyProblem& problem,
                       const SpectralPrior& prior) {
  if (problem.data.size() != problem.measurement_points.size())
    throw std::invalid_argument("darcy_potential: problem carries no data");
  const std::vector<double> g = darcy_forward(state, problem, prior);
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double r = problem.data[k] - g[k];
    acc += r * r;
  }
  if (acc == 0.0) return 0.0;
  if (!(problem.noise_sigma > 0.0))
    throw std::domain_error("darcy_potential: zero noise, nonzero residual");
  return 0.5 * acc / (problem.noise_sigma * problem.noise_sigma);
}

Target make_darcy_target(const DarcyProblem& problem,
                         const SpectralPrior& prior) {
  problem.validate();
  if (problem.data.empty())
    throw std::invalid_argument("make_darcy_target: problem carries no data");
  Target t;
  t.potential = [problem, prior](const CoefficientState& s) {
    return darcy_potential(s, problem, prior);
  };
  GaussianMisfit misfit;
  misfit.noise_sigma = problem.noise_sigma;
  misfit.data_dim = problem.data.size();
  misfit.residual = [problem, prior](const CoefficientState& s) {
    std::vector<double> r = darcy_forward(s, problem, prior);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = problem.data[k] - r[k];
    return r;
  };
  t.misfit = misfit;
  return t;
}

}  // namespace fsmcmc
