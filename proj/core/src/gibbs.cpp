#include "fsmcmc/gibbs.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fsmcmc {

namespace {

double residual_sq_norm(const std::vector<double>& r) {
  return std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
}

bool accept(double log_ratio, RngStream& rng) {
  return log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio);
}

// pCN move restricted to the active block; MH on the conditional given the
// mask, so the acceptance is the plain Phi difference.
bool pcn_coefficient_move(ChainState& chain, const Target& target, double beta,
                          RngStream& rng) {
  CoefficientState v = propose_pcn(chain.state, beta, rng);
  const double phi_v = target.potential(v);
  const bool ok = accept(chain.phi - phi_v, rng);
  if (ok) {
    chain.state = std::move(v);
    chain.phi = phi_v;
  }
  return ok;
}

}  // namespace

std::vector<std::vector<std::size_t>> kl_blocks(std::size_t mode_count,
                                                std::size_t num_blocks) {
  if (num_blocks < 1 || num_blocks > mode_count)
    throw std::invalid_argument("kl_blocks: need 1 <= blocks <= mode_count");
  std::vector<std::vector<std::size_t>> blocks(num_blocks);
  for (std::size_t j = 0; j + 1 < num_blocks; ++j) blocks[j] = {j};
  for (std::size_t i = num_blocks - 1; i < mode_count; ++i)
    blocks.back().push_back(i);
  return blocks;
}

StepResult mwg_block_step(ChainState& chain, const Target& target,
                          std::span<const std::size_t> block, RngStream& rng) {
  if (block.empty()) throw std::invalid_argument("mwg_block_step: empty block");
  CoefficientState v = chain.state;
  bool touched = false;
  for (const std::size_t i : block) {
    if (i >= v.z.size())
      throw std::out_of_range("mwg_block_step: block index out of range");
    if (!v.is_active(i)) continue;
    v.z[i] = rng.normal();
    touched = true;
  }

  StepResult result;
  if (!touched) {  // block entirely masked off: identity move
    result.accepted = true;
    chain.step_index += 1;
    chain.accepted_last = true;
    return result;
  }
  const double phi_v = target.potential(v);
  result.log_ratio = chain.phi - phi_v;
  result.accepted = accept(result.log_ratio, rng);
  if (result.accepted) {
    chain.state = std::move(v);
    chain.phi = phi_v;
  }
  chain.step_index += 1;
  chain.accepted_last = result.accepted;
  return result;
}

double mwg_sweep(ChainState& chain, const Target& target,
                 const std::vector<std::vector<std::size_t>>& partition,
                 RngStream& rng) {
  if (partition.empty()) throw std::invalid_argument("mwg_sweep: no blocks");
  std::size_t accepted = 0;
  for (const auto& block : partition)
    accepted += mwg_block_step(chain, target, block, rng).accepted ? 1 : 0;
  return static_cast<double>(accepted) / static_cast<double>(partition.size());
}

RtmStepResult rtm_step(ChainState& chain, const Target& target,
                       const TruncationLaw& law, double pcn_beta,
                       RngStream& rng) {
  if (!chain.state.trunc)
    throw std::invalid_argument("rtm_step: state carries no truncation level");
  if (law.mode_count() != chain.state.z.size())
    throw std::invalid_argument("rtm_step: law/state mode_count mismatch");
  RtmStepResult result;
  result.coeff_accepted = pcn_coefficient_move(chain, target, pcn_beta, rng);
  // Inactive coordinates are prior-distributed given everything else;
  // refreshing them is exact Gibbs and lets level moves re-expose fresh
  // draws instead of stale ones.
  for (std::size_t i = *chain.state.trunc; i < chain.state.z.size(); ++i)
    chain.state.z[i] = rng.normal();

  const std::size_t n = chain.state.z.size();
  const std::size_t d_u = *chain.state.trunc;
  if (n > 1) {
    // +/-1 proposal, deterministic push-off at the boundaries.
    std::size_t d_v;
    double log_q_fwd;
    if (d_u == 1) {
      d_v = 2;
      log_q_fwd = 0.0;
    } else if (d_u == n) {
      d_v = n - 1;
      log_q_fwd = 0.0;
    } else {
      d_v = rng.uniform() < 0.5 ? d_u - 1 : d_u + 1;
      log_q_fwd = std::log(0.5);
    }
    const double log_q_rev =
        (d_v == 1 || d_v == n) ? 0.0 : std::log(0.5);

    CoefficientState v = chain.state;
    v.trunc = d_v;
    const double phi_v = target.potential(v);
    const double lr = chain.phi - phi_v + law.log_pmf(d_v) - law.log_pmf(d_u) +
                      log_q_rev - log_q_fwd;
    if (accept(lr, rng)) {
      chain.state = std::move(v);
      chain.phi = phi_v;
      result.level_accepted = true;
    }
  }
  result.level = *chain.state.trunc;
  chain.step_index += 1;
  chain.accepted_last = result.coeff_accepted;
  return result;
}

bool sieve_switch_move(ChainState& chain, const Target& target,
                       const SieveLaw& law, RngStream& rng) {
  if (!chain.state.switches)
    throw std::invalid_argument("sieve_switch_move: state carries no switches");
  auto& sw = *chain.state.switches;
  const std::size_t n = sw.size();
  std::size_t n_on = 0;
  for (auto s : sw) n_on += (s != 0);

  // Direction: fair coin, except the impossible direction at a boundary
  // proposes the opposite move.
  bool activate;
  double log_p_dir;
  if (n_on == 0) {
    activate = true;
    log_p_dir = 0.0;
  } else if (n_on == n) {
    activate = false;
    log_p_dir = 0.0;
  } else {
    activate = rng.uniform() < 0.5;
    log_p_dir = std::log(0.5);
  }

  const std::size_t pool = activate ? n - n_on : n_on;
  std::size_t pick = rng.uniform_index(pool);
  std::size_t idx = n;
  for (std::size_t i = 0; i < n; ++i) {
    const bool candidate = activate ? sw[i] == 0 : sw[i] != 0;
    if (candidate && pick-- == 0) {
      idx = i;
      break;
    }
  }

  CoefficientState v = chain.state;
  (*v.switches)[idx] = activate ? 1 : 0;
  const std::size_t n_on_v = activate ? n_on + 1 : n_on - 1;

  // Reverse move: the opposite direction from v, forced if v sits at a
  // boundary.
  const bool rev_forced = activate ? (n_on_v == n) : (n_on_v == 0);
  const double log_p_dir_rev = rev_forced ? 0.0 : std::log(0.5);
  const std::size_t rev_pool = activate ? n_on_v : n - n_on_v;

  const double log_q_fwd = log_p_dir - std::log(static_cast<double>(pool));
  const double log_q_rev =
      log_p_dir_rev - std::log(static_cast<double>(rev_pool));

  const double phi_v = target.potential(v);
  const double prior_diff = -law.rate * (static_cast<double>(n_on_v) -
                                         static_cast<double>(n_on));
  const double lr = chain.phi - phi_v + prior_diff + log_q_rev - log_q_fwd;
  if (accept(lr, rng)) {
    chain.state = std::move(v);
    chain.phi = phi_v;
    return true;
  }
  return false;
}

SieveStepResult sieve_step(ChainState& chain, const Target& target,
                           const SieveLaw& law, double pcn_beta,
                           RngStream& rng) {
  if (!chain.state.switches)
    throw std::invalid_argument("sieve_step: state carries no switches");
  SieveStepResult result;
  result.coeff_accepted = pcn_coefficient_move(chain, target, pcn_beta, rng);
  result.switch_accepted = sieve_switch_move(chain, target, law, rng);
  result.active = chain.state.active_count();
  chain.step_index += 1;
  chain.accepted_last = result.coeff_accepted;
  return result;
}

double sample_precision(const Target& target, const CoefficientState& u,
                        const PrecisionHyperprior& hyper, RngStream& rng) {
  hyper.validate();
  if (!target.misfit)
    throw std::invalid_argument("sample_precision: target has no misfit");
  const std::vector<double> r = target.misfit->residual(u);
  const double shape = hyper.alpha_sigma + 0.5 * static_cast<double>(r.size());
  const double rate = hyper.beta_sigma + 0.5 * residual_sq_norm(r);
  return rng.gamma(shape, rate);
}

double marginal_potential(const Target& target,
                          const PrecisionHyperprior& hyper,
                          const CoefficientState& u) {
  hyper.validate();
  if (!target.misfit)
    throw std::invalid_argument("marginal_potential: target has no misfit");
  const std::vector<double> r = target.misfit->residual(u);
  const double shape = hyper.alpha_sigma + 0.5 * static_cast<double>(r.size());
  return shape * std::log(hyper.beta_sigma + 0.5 * residual_sq_norm(r));
}

PrecisionGibbs::PrecisionGibbs(Target target, PrecisionHyperprior hyper,
                               CoefficientState initial, double initial_tau)
    : target_(std::move(target)),
      hyper_(hyper),
      state_(std::move(initial)),
      tau_(initial_tau) {
  hyper_.validate();
  if (!target_.misfit)
    throw std::invalid_argument("PrecisionGibbs: target has no misfit");
  if (!(initial_tau > 0.0))
    throw std::invalid_argument("PrecisionGibbs: initial tau must be > 0");
  const std::vector<double> r = target_.misfit->residual(state_);
  if (r.size() != target_.misfit->data_dim)
    throw std::invalid_argument("PrecisionGibbs: misfit data_dim mismatch");
  r2_ = residual_sq_norm(r);
}

PrecisionGibbs::SweepResult PrecisionGibbs::sweep(double pcn_beta,
                                                  RngStream& rng) {
  // u | tau under Phi_tau(u) = tau/2 |y - G(u)|^2.
  CoefficientState v = propose_pcn(state_, pcn_beta, rng);
  const double r2_v = residual_sq_norm(target_.misfit->residual(v));
  const double lr = 0.5 * tau_ * (r2_ - r2_v);
  SweepResult result;
  if (lr >= 0.0 || rng.uniform() < std::exp(lr)) {
    state_ = std::move(v);
    r2_ = r2_v;
    result.accepted = true;
  }
  // tau | u is conjugate.
  const double shape =
      hyper_.alpha_sigma + 0.5 * static_cast<double>(target_.misfit->data_dim);
  tau_ = rng.gamma(shape, hyper_.beta_sigma + 0.5 * r2_);
  result.tau = tau_;
  return result;
}

}  // namespace fsmcmc
