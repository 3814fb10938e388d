#include <doctest.h>

#include <cmath>

#include "fsmcmc/models/density.hpp"
#include "fsmcmc/target.hpp"

using namespace fsmcmc;

namespace {

const SpectralPrior& density_prior() {
  static const auto prior = SpectralPrior::fourier1d(2.0, 1.0, 10.0, 12);
  return prior;
}

}  // namespace

TEST_CASE("flat field gives the uniform-density potential d_y ln(2 ell)") {
  DensityData data;
  data.observations = {1.5};
  DensityTarget target(density_prior(), data);
  CoefficientState zero;
  zero.z.assign(12, 0.0);
  CHECK(target.potential(zero) == doctest::Approx(std::log(20.0)).epsilon(1e-9));

  data.observations = {1.5, -4.0, 9.0};
  DensityTarget target3(density_prior(), data);
  CHECK(target3.potential(zero) ==
        doctest::Approx(3.0 * std::log(20.0)).epsilon(1e-9));
}

TEST_CASE("potential is invariant under constant shifts of u") {
  DensityData data;
  data.observations = {-3.3, 0.2, 6.1, 6.2};
  DensityTarget target(density_prior(), data);
  RngStream rng(1);
  CoefficientState state = density_prior().sample(rng);
  const double base = target.potential(state);

  // Mode 0 is the constant basis function: shifting z_0 shifts u by a
  // constant, which the normalization cancels.
  CoefficientState shifted = state;
  shifted.z[0] += 5.0;
  CHECK(target.potential(shifted) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("single-mode potential matches an independent quadrature") {
  DensityData data;
  data.observations = {0.0};  // grid node of the odd-count uniform grid
  data.quad_points = 2049;
  DensityTarget target(density_prior(), data);

  CoefficientState state;
  state.z.assign(12, 0.0);
  state.z[1] = 1.3;  // cos mode

  // Oracle: straight trapezoid over its own grid, no shared code path.
  const double ell = 10.0;
  const std::size_t n = 2049;
  const double h = 2.0 * ell / static_cast<double>(n - 1);
  const double lambda = density_prior().mode_std(1);
  auto u_at = [&](double x) {
    return lambda * 1.3 * std::cos(M_PI * x / ell) / std::sqrt(ell);
  };
  double z_quad = 0.0;
  for (std::size_t g = 0; g < n; ++g) {
    const double x = -ell + h * static_cast<double>(g);
    const double w = (g == 0 || g == n - 1) ? 0.5 * h : h;
    z_quad += w * std::exp(u_at(x));
  }
  const double expected = -(u_at(0.0) - std::log(z_quad));
  CHECK(target.potential(state) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("analytic gradient matches finite differences") {
  DensityData data;
  RngStream data_rng(7);
  data.observations =
      sample_from_density([](double x) { return rho1_unnormalized(x); }, 10.0,
                          40, data_rng);
  DensityTarget dt(density_prior(), data);
  const Target target = dt.as_target();

  RngStream rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const CoefficientState state = density_prior().sample(rng);
    const std::vector<double> analytic = target.gradient(state);
    const std::vector<double> fd = finite_difference_gradient(target, state);
    for (std::size_t i = 0; i < analytic.size(); ++i)
      CHECK(std::abs(analytic[i] - fd[i]) <
            1e-5 * std::max(1.0, std::abs(analytic[i])));

    // Directional form: random unit direction against the inner product.
    std::vector<double> dir(analytic.size());
    double norm = 0.0;
    for (auto& d : dir) {
      d = rng.normal();
      norm += d * d;
    }
    norm = std::sqrt(norm);
    CoefficientState plus = state;
    CoefficientState minus = state;
    const double h = 1e-5;
    double along = 0.0;
    for (std::size_t i = 0; i < dir.size(); ++i) {
      dir[i] /= norm;
      plus.z[i] += h * dir[i];
      minus.z[i] -= h * dir[i];
      along += analytic[i] * dir[i];
    }
    const double fd_dir =
        (target.potential(plus) - target.potential(minus)) / (2.0 * h);
    CHECK(std::abs(fd_dir - along) / std::max(1e-12, std::abs(along)) < 1e-5);
  }
}

TEST_CASE("gradient symmetries") {
  DensityData data;
  data.observations = {-2.5, 2.5};  // symmetric data
  DensityTarget target(density_prior(), data);
  CoefficientState zero;
  zero.z.assign(12, 0.0);
  const std::vector<double> grad = target.gradient(zero);

  // Constant mode: shift invariance makes the entry vanish identically.
  CHECK(grad[0] == doctest::Approx(0.0).epsilon(1e-12));
  // Sine modes are odd; under u = 0 and symmetric data both terms vanish.
  CHECK(std::abs(grad[2]) < 1e-10);
  CHECK(std::abs(grad[4]) < 1e-10);
}

TEST_CASE("gradient entries of masked modes are zero") {
  DensityData data;
  data.observations = {1.0, 2.0};
  DensityTarget target(density_prior(), data);
  RngStream rng(5);
  CoefficientState state = density_prior().sample(rng);
  state.trunc = 4;
  const std::vector<double> grad = target.gradient(state);
  for (std::size_t i = 4; i < grad.size(); ++i) CHECK(grad[i] == 0.0);
}

TEST_CASE("observations outside the interval are rejected") {
  DensityData data;
  data.observations = {11.0};
  CHECK_THROWS_AS(data.validate(), std::out_of_range);
}

TEST_CASE("density sampling stays in range and matches rho1 shape") {
  RngStream rng(9);
  const auto draws = sample_from_density(
      [](double x) { return rho1_unnormalized(x); }, 10.0, 20000, rng);
  double mean = 0.0;
  std::size_t in_modes = 0;
  for (const double d : draws) {
    REQUIRE(std::abs(d) <= 10.0);
    mean += d;
    in_modes += std::abs(std::abs(d) - 3.0) < 2.0;
  }
  mean /= static_cast<double>(draws.size());
  CHECK(std::abs(mean) < 3.0 * 3.2 / std::sqrt(20000.0));
  CHECK(static_cast<double>(in_modes) / draws.size() > 0.9);
}

TEST_CASE("quadrature weights sum to the interval length") {
  DensityData data;
  data.observations = {0.0};
  DensityTarget target(density_prior(), data);
  double total = 0.0;
  for (const double w : target.quad_weights()) total += w;
  CHECK(total == doctest::Approx(20.0).epsilon(1e-12));
}
