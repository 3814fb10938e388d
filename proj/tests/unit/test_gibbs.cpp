#include <doctest.h>

#include <cmath>
#include <map>

#include "fsmcmc/gibbs.hpp"
#include "fsmcmc/models/linear_gaussian.hpp"

using namespace fsmcmc;

namespace {

const SpectralPrior& test_prior() {
  static const auto prior = SpectralPrior::fourier1d(2.0, 1.0, 10.0, 6);
  return prior;
}

Target quadratic_target() {
  LinearGaussianTarget lin;
  lin.weights = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  lin.data = {0.5, -0.2, 1.1, 0.0, -0.7, 0.3};
  lin.noise_sigma = 1.0;
  return make_linear_gaussian_target(lin, test_prior());
}

}  // namespace

TEST_CASE("kl_blocks builds singletons plus a tail block") {
  const auto blocks = kl_blocks(6, 3);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0] == std::vector<std::size_t>{0});
  CHECK(blocks[1] == std::vector<std::size_t>{1});
  CHECK(blocks[2] == std::vector<std::size_t>{2, 3, 4, 5});
  CHECK(kl_blocks(4, 4).back() == std::vector<std::size_t>{3});
  CHECK_THROWS_AS((void)kl_blocks(4, 5), std::invalid_argument);
}

TEST_CASE("MwG on the flat potential accepts everything") {
  const Target target = prior_target();
  RngStream rng(1);
  ChainState chain = make_chain_state(test_prior().sample(rng), target);
  const auto partition = kl_blocks(6, 4);
  for (int sweep = 0; sweep < 200; ++sweep)
    CHECK(mwg_sweep(chain, target, partition, rng) == 1.0);
}

TEST_CASE("single-block MwG matches the independence sampler acceptance") {
  const Target target = quadratic_target();
  const auto partition = kl_blocks(6, 1);
  const std::size_t n = 20000;

  RngStream rng_a(2);
  ChainState mwg_chain = make_chain_state(test_prior().sample(rng_a), target);
  std::size_t mwg_accepted = 0;
  for (std::size_t s = 0; s < n; ++s)
    mwg_accepted +=
        mwg_block_step(mwg_chain, target, partition[0], rng_a).accepted;

  RngStream rng_b(3);
  ChainState ind_chain = make_chain_state(test_prior().sample(rng_b), target);
  std::size_t ind_accepted = 0;
  const ProposalConfig indep = ProposalConfig::independence();
  for (std::size_t s = 0; s < n; ++s)
    ind_accepted +=
        mh_step(ind_chain, target, test_prior(), indep, rng_b).accepted;

  const double p_mwg = static_cast<double>(mwg_accepted) / n;
  const double p_ind = static_cast<double>(ind_accepted) / n;
  CHECK(std::abs(p_mwg - p_ind) <
        3.0 * std::sqrt(2.0 * 0.25 / static_cast<double>(n)) + 0.02);
}

TEST_CASE("empty blocks are rejected") {
  const Target target = prior_target();
  RngStream rng(4);
  ChainState chain = make_chain_state(test_prior().sample(rng), target);
  const std::vector<std::size_t> empty;
  CHECK_THROWS_AS((void)mwg_block_step(chain, target, empty, rng),
                  std::invalid_argument);
}

TEST_CASE("rtm level chain leaves the truncation prior invariant") {
  const Target target = prior_target();
  const double rate = 0.5;
  const TruncationLaw law(rate, 10);
  RngStream rng(5);
  CoefficientState init;
  init.z.assign(10, 0.0);
  for (auto& z : init.z) z = rng.normal();
  init.trunc = law.sample(rng);
  ChainState chain = make_chain_state(init, target);
  const std::size_t steps = 100000;
  std::size_t c1 = 0;
  std::size_t c2 = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto r = rtm_step(chain, target, law, 0.5, rng);
    c1 += r.level == 1;
    c2 += r.level == 2;
  }
  const double ratio = static_cast<double>(c1) / static_cast<double>(c2);
  // Dependent samples; allow a wide but decisive band around exp(rate).
  CHECK(ratio == doctest::Approx(std::exp(rate)).epsilon(0.15));
}

TEST_CASE("rtm with a huge rate collapses to level 1") {
  const Target target = prior_target();
  const TruncationLaw law(20.0, 8);
  RngStream rng(6);
  CoefficientState init;
  init.z.assign(8, 0.0);
  init.trunc = 5;
  ChainState chain = make_chain_state(init, target);
  std::size_t at_one = 0;
  const std::size_t steps = 20000;
  for (std::size_t s = 0; s < steps; ++s)
    at_one += rtm_step(chain, target, law, 0.5, rng).level == 1;
  CHECK(static_cast<double>(at_one) / steps > 0.95);
}

TEST_CASE("rtm boundary never proposes level 0 and matches the prior law") {
  const Target target = prior_target();
  const double rate = 1.0;
  const std::size_t n_modes = 5;
  const TruncationLaw law(rate, n_modes);
  RngStream rng(7);
  CoefficientState init;
  init.z.assign(n_modes, 0.0);
  init.trunc = 1;
  ChainState chain = make_chain_state(init, target);
  std::map<std::size_t, double> visits;
  const std::size_t steps = 200000;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto r = rtm_step(chain, target, law, 0.5, rng);
    REQUIRE(r.level >= 1);
    REQUIRE(r.level <= n_modes);
    visits[r.level] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t level = 1; level <= n_modes; ++level)
    tv += std::abs(visits[level] / static_cast<double>(steps) - law.pmf(level));
  CHECK(0.5 * tv < 0.02);
}

TEST_CASE("sieve switch chain with flat everything is Binomial(N, 1/2)") {
  const Target target = prior_target();
  const SieveLaw law{0.0};
  const std::size_t n_modes = 8;
  RngStream rng(8);
  CoefficientState init;
  init.z.assign(n_modes, 0.0);
  init.switches = std::vector<std::uint8_t>(n_modes, 0);
  ChainState chain = make_chain_state(init, target);
  const std::size_t moves = 100000;
  double mean_on = 0.0;
  for (std::size_t s = 0; s < moves; ++s) {
    sieve_switch_move(chain, target, law, rng);
    mean_on += static_cast<double>(chain.state.active_count());
  }
  mean_on /= static_cast<double>(moves);
  // sd of N_on is sqrt(N)/2; single-flip dynamics carry IACT about N.
  const double se = 0.5 * std::sqrt(static_cast<double>(n_modes)) *
                    std::sqrt(static_cast<double>(n_modes) /
                              static_cast<double>(moves));
  CHECK(std::abs(mean_on - 4.0) < 3.0 * se + 0.01);
}

TEST_CASE("sieve boundary states always move inward") {
  const Target target = prior_target();
  const SieveLaw law{0.0};
  RngStream rng(9);
  CoefficientState all_off;
  all_off.z.assign(4, 0.0);
  all_off.switches = std::vector<std::uint8_t>(4, 0);
  ChainState chain = make_chain_state(all_off, target);
  sieve_switch_move(chain, target, law, rng);
  CHECK(chain.state.active_count() == 1);

  CoefficientState all_on;
  all_on.z.assign(4, 0.0);
  all_on.switches = std::vector<std::uint8_t>(4, 1);
  ChainState chain2 = make_chain_state(all_on, target);
  sieve_switch_move(chain2, target, law, rng);
  CHECK(chain2.state.active_count() == 3);
}

TEST_CASE("sample_precision follows the conjugate Gamma") {
  PrecisionHyperprior hyper{2.0, 3.0};
  RngStream rng(10);

  SUBCASE("zero residual leaves the data-free posterior") {
    Target t;
    t.potential = [](const CoefficientState&) { return 0.0; };
    GaussianMisfit misfit;
    misfit.data_dim = 4;
    misfit.residual = [](const CoefficientState&) {
      return std::vector<double>(4, 0.0);
    };
    t.misfit = misfit;
    CoefficientState u;
    u.z = {0.0};
    const int n = 100000;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += sample_precision(t, u, hyper, rng);
    mean /= n;
    const double shape = hyper.alpha_sigma + 2.0;
    const double expect = shape / hyper.beta_sigma;
    const double se = std::sqrt(shape) / hyper.beta_sigma / std::sqrt(n);
    CHECK(std::abs(mean - expect) < 3.0 * se);
  }

  SUBCASE("no data reproduces the prior") {
    Target t;
    t.potential = [](const CoefficientState&) { return 0.0; };
    GaussianMisfit misfit;
    misfit.data_dim = 0;
    misfit.residual = [](const CoefficientState&) {
      return std::vector<double>{};
    };
    t.misfit = misfit;
    CoefficientState u;
    u.z = {0.0};
    const int n = 100000;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += sample_precision(t, u, hyper, rng);
    mean /= n;
    const double expect = hyper.alpha_sigma / hyper.beta_sigma;
    const double se =
        std::sqrt(hyper.alpha_sigma) / hyper.beta_sigma / std::sqrt(n);
    CHECK(std::abs(mean - expect) < 3.0 * se);
  }

  SUBCASE("fixed residual shifts the rate by |r|^2/2") {
    Target t;
    t.potential = [](const CoefficientState&) { return 0.0; };
    const std::vector<double> r = {1.0, -2.0, 0.5};
    GaussianMisfit misfit;
    misfit.data_dim = 3;
    misfit.residual = [r](const CoefficientState&) { return r; };
    t.misfit = misfit;
    CoefficientState u;
    u.z = {0.0};
    const double r2 = 1.0 + 4.0 + 0.25;
    const double shape = hyper.alpha_sigma + 1.5;
    const double rate = hyper.beta_sigma + 0.5 * r2;
    const int n = 100000;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += sample_precision(t, u, hyper, rng);
    mean /= n;
    CHECK(std::abs(mean - shape / rate) <
          3.0 * std::sqrt(shape) / rate / std::sqrt(n));
  }

  SUBCASE("missing misfit throws") {
    Target t;
    t.potential = [](const CoefficientState&) { return 0.0; };
    CoefficientState u;
    u.z = {0.0};
    CHECK_THROWS_AS((void)sample_precision(t, u, hyper, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("marginal potential") {
  PrecisionHyperprior hyper{0.7, 1.0};
  Target t;
  t.potential = [](const CoefficientState&) { return 0.0; };
  std::vector<double> r = {0.0, 0.0};
  GaussianMisfit misfit;
  misfit.data_dim = 2;
  misfit.residual = [&r](const CoefficientState&) { return r; };
  t.misfit = misfit;
  CoefficientState u;
  u.z = {0.0};

  SUBCASE("zero residual with unit rate gives zero") {
    CHECK(marginal_potential(t, hyper, u) == doctest::Approx(0.0));
  }

  SUBCASE("monotone in the residual norm") {
    r = {1.0, 1.0};
    const double small = marginal_potential(t, hyper, u);
    r = {2.0, 2.0};
    const double big = marginal_potential(t, hyper, u);
    CHECK(big > small);
  }

  SUBCASE("matches the quadrature of the integrated likelihood") {
    r = {0.8, -1.3};
    const double r2 = 0.8 * 0.8 + 1.3 * 1.3;
    const double value = marginal_potential(t, hyper, u);
    // -ln m(y) with m the full tau integral, constants via lgamma:
    // (a+J/2) ln(b+r^2/2) = -ln m - (J/2) ln(2 pi) + a ln b
    //                       + lgamma(a+J/2) - lgamma(a).
    const double a = hyper.alpha_sigma;
    const double b = hyper.beta_sigma;
    const double J = 2.0;
    // Quadrature of m(y) over tau = e^s.
    const std::size_t n = 40001;
    const double lo = -20.0;
    const double hi = 20.0;
    const double ds = (hi - lo) / static_cast<double>(n - 1);
    double peak = -1e300;
    std::vector<double> logs(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = lo + ds * static_cast<double>(k);
      const double tau = std::exp(s);
      logs[k] = a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(tau) -
                b * tau + 0.5 * J * std::log(tau / (2.0 * M_PI)) -
                0.5 * tau * r2 + s;  // + s from the jacobian
      peak = std::max(peak, logs[k]);
    }
    double mass = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      mass += w * std::exp(logs[k] - peak);
    }
    const double log_m = peak + std::log(mass * ds);
    const double expected = -log_m - 0.5 * J * std::log(2.0 * M_PI) +
                            a * std::log(b) + std::lgamma(a + 0.5 * J) -
                            std::lgamma(a);
    CHECK(value == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("precision gibbs keeps tau positive and mixes") {
  const auto prior = SpectralPrior::fourier1d(2.0, 1.0, 10.0, 4);
  LinearGaussianTarget lin;
  lin.weights = {1.0, 1.0, 1.0, 1.0};
  lin.data = {0.3, -0.8, 0.1, 0.9};
  lin.noise_sigma = 1.0;
  const Target target = make_linear_gaussian_target(lin, prior);
  RngStream rng(12);
  PrecisionGibbs gibbs(target, PrecisionHyperprior{1.0, 1.0},
                       prior.sample(rng), 1.0);
  std::size_t accepted = 0;
  for (int s = 0; s < 5000; ++s) {
    const auto r = gibbs.sweep(0.5, rng);
    REQUIRE(r.tau > 0.0);
    accepted += r.accepted;
  }
  CHECK(accepted > 500);
}
