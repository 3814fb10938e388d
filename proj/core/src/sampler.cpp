#include "fsmcmc/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace fsmcmc {

namespace {

bool needs_gradient(ProposalKind kind) {
  return kind == ProposalKind::kCnl || kind == ProposalKind::kPcnl;
}

double langevin_rho(const SpectralPrior& prior, bool preconditioned,
                    double delta, const CoefficientState& from, double phi_from,
                    const std::vector<double>& grad_from,
                    const CoefficientState& to) {
  double lin = 0.0;   // <to - from, DPhi(from)>
  double mid = 0.0;   // <C^-1 (from + to), DPhi(from)> or <from + to, DPhi>
  double grad2 = 0.0; // ||DPhi||^2 or ||C^1/2 DPhi||^2
  for (std::size_t i = 0; i < from.z.size(); ++i) {
    if (!from.is_active(i)) continue;
    const double g = grad_from[i];
    lin += (to.z[i] - from.z[i]) * g;
    if (preconditioned) {
      mid += (from.z[i] + to.z[i]) * g;
      grad2 += g * g;
    } else {
      const double l2 = prior.eigenvalue(i);
      mid += (from.z[i] + to.z[i]) * g / l2;
      grad2 += g * g / l2;
    }
  }
  return phi_from + 0.5 * lin + 0.25 * delta * mid + 0.25 * delta * grad2;
}

double log_ratio_impl(const ProposalConfig& config, const SpectralPrior& prior,
                      const Target& target, double effective_delta,
                      const CoefficientState& u, double phi_u,
                      const CoefficientState& v, double phi_v,
                      const std::vector<double>* grad_u) {
  if (!std::isfinite(phi_u) || !std::isfinite(phi_v))
    throw std::runtime_error("accept_log_ratio: non-finite potential");
  switch (config.kind) {
    case ProposalKind::kPcn:
    case ProposalKind::kIndependence:
      return phi_u - phi_v;
    case ProposalKind::kRwIdentity:
    case ProposalKind::kRwCovariance:
      return phi_u - phi_v + prior_sq_norm(u) - prior_sq_norm(v);
    case ProposalKind::kThetaCn: {
      // Per mode, the proposal is z_v = a z_u + b g; the transition plus
      // prior correction is (z_v^2 - z_u^2)(1 - a^2 - b^2)/(2 b^2), and
      // 1 - a^2 - b^2 = delta^2 (2 theta - 1)/den^2 exactly, giving the
      // closed forms below.
      const double d = effective_delta;
      const double skew = d * (2.0 * config.theta - 1.0) / 4.0;
      double corr = 0.0;
      if (skew != 0.0) {
        for (std::size_t i = 0; i < u.z.size(); ++i) {
          if (!u.is_active(i)) continue;
          const double dz2 = v.z[i] * v.z[i] - u.z[i] * u.z[i];
          corr += config.precond == Precond::kCovariance
                      ? skew * dz2
                      : skew * dz2 / prior.eigenvalue(i);
        }
      }
      return phi_u - phi_v + corr;
    }
    case ProposalKind::kCnl:
    case ProposalKind::kPcnl: {
      if (!target.has_gradient())
        throw std::runtime_error("accept_log_ratio: target has no gradient");
      const bool pre = config.kind == ProposalKind::kPcnl;
      const std::vector<double> gv = target.gradient(v);
      std::vector<double> gu_local;
      if (grad_u == nullptr) {
        gu_local = target.gradient(u);
        grad_u = &gu_local;
      }
      const double fwd =
          langevin_rho(prior, pre, effective_delta, u, phi_u, *grad_u, v);
      const double rev =
          langevin_rho(prior, pre, effective_delta, v, phi_v, gv, u);
      return fwd - rev;
    }
  }
  throw std::logic_error("accept_log_ratio: unknown proposal kind");
}

}  // namespace

ChainState make_chain_state(CoefficientState state, const Target& target) {
  state.validate_shape();
  ChainState chain;
  chain.phi = target.potential(state);
  chain.state = std::move(state);
  return chain;
}

double accept_log_ratio(const ProposalConfig& config,
                        const SpectralPrior& prior, const Target& target,
                        const CoefficientState& u, const CoefficientState& v) {
  return log_ratio_impl(config, prior, target, config.delta, u,
                        target.potential(u), v, target.potential(v), nullptr);
}

StepResult mh_step(ChainState& chain, const Target& target,
                   const SpectralPrior& prior, const ProposalConfig& config,
                   RngStream& rng) {
  config.validate();
  const double delta = random_delta_wrap(config, rng);

  CoefficientState v;
  std::vector<double> grad_u;
  const std::vector<double>* grad_u_ptr = nullptr;
  switch (config.kind) {
    case ProposalKind::kPcn:
      v = propose_pcn(chain.state, beta_from_delta(delta), rng);
      break;
    case ProposalKind::kIndependence:
      v = propose_pcn(chain.state, 1.0, rng);
      break;
    case ProposalKind::kRwIdentity:
      v = propose_rw(chain.state, prior, delta, Precond::kIdentity, rng);
      break;
    case ProposalKind::kRwCovariance:
      v = propose_rw(chain.state, prior, delta, Precond::kCovariance, rng);
      break;
    case ProposalKind::kThetaCn:
      v = propose_theta_cn(chain.state, prior, delta, config.theta,
                           config.precond, rng);
      break;
    case ProposalKind::kCnl:
    case ProposalKind::kPcnl: {
      if (!target.has_gradient())
        throw std::runtime_error("mh_step: langevin needs a gradient");
      grad_u = target.gradient(chain.state);
      grad_u_ptr = &grad_u;
      v = propose_langevin(chain.state, prior, delta,
                           config.kind == ProposalKind::kPcnl, grad_u, rng);
      break;
    }
  }

  const double phi_v = target.potential(v);
  const double lr = log_ratio_impl(config, prior, target, delta, chain.state,
                                   chain.phi, v, phi_v, grad_u_ptr);

  StepResult result;
  result.log_ratio = lr;
  result.effective_delta = delta;
  result.accepted = lr >= 0.0 || rng.uniform() < std::exp(lr);
  if (result.accepted) {
    chain.state = std::move(v);
    chain.phi = phi_v;
  }
  chain.step_index += 1;
  chain.accepted_last = result.accepted;
  return result;
}

}  // namespace fsmcmc
