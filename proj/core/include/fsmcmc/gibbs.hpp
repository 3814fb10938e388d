#pragma once

#include <span>
#include <vector>

#include "fsmcmc/sampler.hpp"

namespace fsmcmc {

/// Blocking in KL coordinates: {0}, {1}, ..., {J-2}, {J-1, ..., d-1}.
std::vector<std::vector<std::size_t>> kl_blocks(std::size_t mode_count,
                                                std::size_t num_blocks);

/// One Metropolis-within-Gibbs block update: independence draw from the
/// block's prior conditional, accepted with min{1, exp(Phi(u) - Phi(v))}.
StepResult mwg_block_step(ChainState& chain, const Target& target,
                          std::span<const std::size_t> block, RngStream& rng);

/// Full sweep over the partition, in order. Returns the fraction of
/// accepted block updates.
double mwg_sweep(ChainState& chain, const Target& target,
                 const std::vector<std::vector<std::size_t>>& partition,
                 RngStream& rng);

struct RtmStepResult {
  bool coeff_accepted = false;
  bool level_accepted = false;
  std::size_t level = 0;
};

/// Random-truncation Gibbs step: a pCN update of the active coefficients
/// given d_u, then a +/-1 move on d_u (reflecting at 1 and mode_count)
/// accepted with the Phi difference, the prior ratio p(d_v)/p(d_u) and the
/// boundary proposal correction.
RtmStepResult rtm_step(ChainState& chain, const Target& target,
                       const TruncationLaw& law, double pcn_beta,
                       RngStream& rng);

struct SieveStepResult {
  bool coeff_accepted = false;
  bool switch_accepted = false;
  std::size_t active = 0;
};

/// Switch move only: with probability 1/2 activate a uniformly chosen
/// inactive mode, else deactivate a uniformly chosen active one (the
/// impossible direction at the boundary proposes the opposite move).
/// Accepted with exp(dPhi) times the sieve prior factor exp(-+rate) times
/// the proposal count ratio.
bool sieve_switch_move(ChainState& chain, const Target& target,
                       const SieveLaw& law, RngStream& rng);

/// pCN update of the active coefficients given the switches, then one
/// switch move.
SieveStepResult sieve_step(ChainState& chain, const Target& target,
                           const SieveLaw& law, double pcn_beta,
                           RngStream& rng);

/// Conjugate update of the noise precision tau = sigma^-2:
/// tau ~ Gamma(alpha_sigma + J/2, beta_sigma + |y - G(u)|^2 / 2).
double sample_precision(const Target& target, const CoefficientState& u,
                        const PrecisionHyperprior& hyper, RngStream& rng);

/// Negative log marginal likelihood with tau integrated out, up to an
/// additive constant: (alpha_sigma + J/2) ln(beta_sigma + |y - G(u)|^2/2).
double marginal_potential(const Target& target,
                          const PrecisionHyperprior& hyper,
                          const CoefficientState& u);

/// Alternates a pCN update of u given tau with the conjugate Gamma update
/// of tau given u, caching |y - G(u)|^2 between phases.
class PrecisionGibbs {
 public:
  PrecisionGibbs(Target target, PrecisionHyperprior hyper,
                 CoefficientState initial, double initial_tau);

  struct SweepResult {
    bool accepted = false;
    double tau = 0.0;
  };
  SweepResult sweep(double pcn_beta, RngStream& rng);

  const CoefficientState& state() const { return state_; }
  double tau() const { return tau_; }
  double residual_sq() const { return r2_; }

 private:
  Target target_;
  PrecisionHyperprior hyper_;
  CoefficientState state_;
  double tau_ = 1.0;
  double r2_ = 0.0;
};

}  // namespace fsmcmc
