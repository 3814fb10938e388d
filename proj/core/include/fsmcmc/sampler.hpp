#pragma once

#include "fsmcmc/proposal.hpp"
#include "fsmcmc/rng.hpp"
#include "fsmcmc/spectral_prior.hpp"
#include "fsmcmc/target.hpp"

namespace fsmcmc {

/// Chain position with its cached potential value.
struct ChainState {
  CoefficientState state;
  double phi = 0.0;
  std::size_t step_index = 0;
  bool accepted_last = false;
};

ChainState make_chain_state(CoefficientState state, const Target& target);

/// Log Metropolis-Hastings ratio for a proposed move u -> v:
///   - pCN / CN / independence: Phi(u) - Phi(v);
///   - theta-CN: Phi(u) - Phi(v) plus the per-mode transition and prior
///     terms, which reduce in closed form to
///     delta (2 theta - 1) / 4 * sum (z_v^2 - z_u^2) [/ lambda_i^2 for the
///     identity preconditioner] and so cancel exactly at theta = 1/2;
///   - random walk: Phi(u) - Phi(v) + prior_sq_norm(u) - prior_sq_norm(v);
///   - CNL / pCNL: rho(u,v) - rho(v,u).
double accept_log_ratio(const ProposalConfig& config,
                        const SpectralPrior& prior, const Target& target,
                        const CoefficientState& u, const CoefficientState& v);

struct StepResult {
  bool accepted = false;
  double log_ratio = 0.0;
  double effective_delta = 0.0;
};

/// One Metropolis-Hastings step: draws the effective scale (honoring a
/// random-scale law), proposes, accepts with min{1, exp(log ratio)}, and
/// refreshes the Phi cache.
StepResult mh_step(ChainState& chain, const Target& target,
                   const SpectralPrior& prior, const ProposalConfig& config,
                   RngStream& rng);

}  // namespace fsmcmc
