#include "fsmcmc/proposal.hpp"

#include <cmath>
#include <stdexcept>

namespace fsmcmc {

double beta_from_delta(double delta) {
  if (delta < 0.0) throw std::invalid_argument("beta_from_delta: delta < 0");
  if (delta > 2.0)
    throw std::invalid_argument("beta_from_delta: delta > 2 leaves [0,1]");
  return std::sqrt(8.0 * delta) / (2.0 + delta);
}

double delta_from_beta(double beta) {
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("delta_from_beta: beta must be in [0,1]");
  if (beta == 0.0) return 0.0;
  if (beta == 1.0) return 2.0;
  const double b2 = beta * beta;
  return (4.0 - 2.0 * b2 - 4.0 * std::sqrt(1.0 - b2)) / b2;
}

double ProposalConfig::beta() const {
  if (kind == ProposalKind::kIndependence) return 1.0;
  return beta_from_delta(delta);
}

ProposalConfig ProposalConfig::pcn(double beta) {
  ProposalConfig c;
  c.kind = ProposalKind::kPcn;
  c.delta = delta_from_beta(beta);
  return c;
}

ProposalConfig ProposalConfig::rw(double delta, Precond precond) {
  ProposalConfig c;
  c.kind = precond == Precond::kIdentity ? ProposalKind::kRwIdentity
                                         : ProposalKind::kRwCovariance;
  c.delta = delta;
  c.precond = precond;
  return c;
}

ProposalConfig ProposalConfig::theta_cn(double delta, double theta,
                                        Precond precond) {
  ProposalConfig c;
  c.kind = ProposalKind::kThetaCn;
  c.delta = delta;
  c.theta = theta;
  c.precond = precond;
  return c;
}

ProposalConfig ProposalConfig::langevin(double delta, bool preconditioned) {
  ProposalConfig c;
  c.kind = preconditioned ? ProposalKind::kPcnl : ProposalKind::kCnl;
  c.delta = delta;
  return c;
}

ProposalConfig ProposalConfig::independence() {
  ProposalConfig c;
  c.kind = ProposalKind::kIndependence;
  c.delta = 2.0;
  return c;
}

void ProposalConfig::validate() const {
  if (delta < 0.0)
    throw std::invalid_argument("ProposalConfig: delta must be >= 0");
  if (kind == ProposalKind::kThetaCn && (theta < 0.0 || theta > 1.0))
    throw std::invalid_argument("ProposalConfig: theta must be in [0,1]");
  if ((kind == ProposalKind::kPcn || kind == ProposalKind::kIndependence) &&
      delta > 2.0)
    throw std::invalid_argument("ProposalConfig: pCN requires delta <= 2");
  if (random_scale) {
    if (random_scale->lo < 0.0 || random_scale->hi < random_scale->lo)
      throw std::invalid_argument("ProposalConfig: bad random-scale bounds");
    const bool beta_law =
        random_scale->parameter == RandomScaleLaw::Parameter::kBeta;
    if (beta_law && random_scale->hi > 1.0)
      throw std::invalid_argument("ProposalConfig: random beta bound > 1");
    if (!beta_law &&
        (kind == ProposalKind::kPcn || kind == ProposalKind::kIndependence) &&
        random_scale->hi > 2.0)
      throw std::invalid_argument("ProposalConfig: random delta bound > 2");
  }
}

CoefficientState propose_pcn(const CoefficientState& u, double beta,
                             RngStream& rng) {
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("propose_pcn: beta must be in [0,1]");
  CoefficientState v = u;
  const double keep = std::sqrt(1.0 - beta * beta);
  for (std::size_t i = 0; i < v.z.size(); ++i) {
    if (!u.is_active(i)) continue;
    v.z[i] = keep * u.z[i] + beta * rng.normal();
  }
  return v;
}

CoefficientState propose_theta_cn(const CoefficientState& u,
                                  const SpectralPrior& prior, double delta,
                                  double theta, Precond precond,
                                  RngStream& rng) {
  if (delta < 0.0) throw std::invalid_argument("propose_theta_cn: delta < 0");
  if (theta < 0.0 || theta > 1.0)
    throw std::invalid_argument("propose_theta_cn: theta must be in [0,1]");
  CoefficientState v = u;
  for (std::size_t i = 0; i < v.z.size(); ++i) {
    if (!u.is_active(i)) continue;
    double a;
    double b;
    if (precond == Precond::kCovariance) {
      const double den = 1.0 + delta * theta;
      a = (1.0 - delta * (1.0 - theta)) / den;
      b = std::sqrt(2.0 * delta) / den;
    } else {
      const double l2 = prior.eigenvalue(i);
      const double den = l2 + delta * theta;
      a = (l2 - delta * (1.0 - theta)) / den;
      b = std::sqrt(2.0 * delta) * prior.mode_std(i) / den;
    }
    v.z[i] = a * u.z[i] + b * rng.normal();
  }
  return v;
}

CoefficientState propose_rw(const CoefficientState& u,
                            const SpectralPrior& prior, double delta,
                            Precond precond, RngStream& rng) {
  if (delta < 0.0) throw std::invalid_argument("propose_rw: delta < 0");
  CoefficientState v = u;
  const double step = std::sqrt(2.0 * delta);
  for (std::size_t i = 0; i < v.z.size(); ++i) {
    if (!u.is_active(i)) continue;
    const double s =
        precond == Precond::kCovariance ? step : step / prior.mode_std(i);
    v.z[i] = u.z[i] + s * rng.normal();
  }
  return v;
}

CoefficientState propose_langevin(const CoefficientState& u,
                                  const SpectralPrior& prior, double delta,
                                  bool preconditioned,
                                  const std::vector<double>& grad,
                                  RngStream& rng) {
  if (delta < 0.0) throw std::invalid_argument("propose_langevin: delta < 0");
  if (grad.size() != u.z.size())
    throw std::invalid_argument("propose_langevin: gradient size mismatch");
  CoefficientState v = u;
  const double noise = std::sqrt(8.0 * delta);
  for (std::size_t i = 0; i < v.z.size(); ++i) {
    if (!u.is_active(i)) continue;
    const double li = prior.mode_std(i);
    if (preconditioned) {
      // (2+delta) z_v = (2-delta) z_u - 2 delta G_i + sqrt(8 delta) g
      v.z[i] = ((2.0 - delta) * u.z[i] - 2.0 * delta * grad[i] +
                noise * rng.normal()) /
               (2.0 + delta);
    } else {
      // (2 l^2+delta) z_v = (2 l^2-delta) z_u - 2 delta G_i
      //                     + sqrt(8 delta) lambda_i g
      const double l2 = prior.eigenvalue(i);
      v.z[i] = ((2.0 * l2 - delta) * u.z[i] - 2.0 * delta * grad[i] +
                noise * li * rng.normal()) /
               (2.0 * l2 + delta);
    }
  }
  return v;
}

double random_delta_wrap(const ProposalConfig& config, RngStream& rng) {
  if (!config.random_scale) return config.delta;
  const auto& law = *config.random_scale;
  const double draw = rng.uniform(law.lo, law.hi);
  if (law.parameter == RandomScaleLaw::Parameter::kBeta)
    return delta_from_beta(draw);
  return draw;
}

}  // namespace fsmcmc
