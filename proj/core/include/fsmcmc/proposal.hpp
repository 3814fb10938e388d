#pragma once

#include <optional>

#include "fsmcmc/rng.hpp"
#include "fsmcmc/spectral_prior.hpp"
#include "fsmcmc/target.hpp"

namespace fsmcmc {

enum class ProposalKind {
  kRwIdentity,    // v = u + sqrt(2 delta) xi, K = I
  kRwCovariance,  // v = u + sqrt(2 delta K) xi, K = C
  kThetaCn,       // theta-weighted Crank-Nicolson family (CN at theta=1/2)
  kPcn,           // v = sqrt(1-beta^2) u + beta w
  kCnl,           // Crank-Nicolson Langevin
  kPcnl,          // preconditioned Crank-Nicolson Langevin
  kIndependence,  // pCN with beta = 1
};

enum class Precond { kIdentity, kCovariance };

/// Uniform law for a per-step random proposal scale.
struct RandomScaleLaw {
  enum class Parameter { kDelta, kBeta };
  Parameter parameter = Parameter::kDelta;
  double lo = 0.0;
  double hi = 0.0;
};

/// beta^2 = 8 delta / (2 + delta)^2, the pCN parameterizations.
double beta_from_delta(double delta);
/// Inverse of beta_from_delta on the branch delta in [0, 2].
double delta_from_beta(double beta);

struct ProposalConfig {
  ProposalKind kind = ProposalKind::kPcn;
  double delta = 0.0;            // step parameter; ignored by kIndependence
  double theta = 0.5;            // kThetaCn only
  Precond precond = Precond::kCovariance;  // kRw*, kThetaCn
  std::optional<RandomScaleLaw> random_scale;

  /// pCN beta equivalent of `delta` (or 1 for the independence sampler).
  double beta() const;
  static ProposalConfig pcn(double beta);
  static ProposalConfig rw(double delta, Precond precond);
  static ProposalConfig theta_cn(double delta, double theta, Precond precond);
  static ProposalConfig langevin(double delta, bool preconditioned);
  static ProposalConfig independence();
  void validate() const;
};

/// pCN move on the active block: z_v = sqrt(1-beta^2) z_u + beta g.
/// Masks carry through unchanged.
CoefficientState propose_pcn(const CoefficientState& u, double beta,
                             RngStream& rng);

/// theta-CN move, diagonalized per mode. For theta=1/2 the covariance
/// preconditioner reproduces pCN and the identity preconditioner
/// reproduces CN.
CoefficientState propose_theta_cn(const CoefficientState& u,
                                  const SpectralPrior& prior, double delta,
                                  double theta, Precond precond,
                                  RngStream& rng);

/// Random-walk move: z_v = z_u + sqrt(2 delta) g (covariance precond) or
/// z_v = z_u + sqrt(2 delta)/lambda_i g (identity precond).
CoefficientState propose_rw(const CoefficientState& u,
                            const SpectralPrior& prior, double delta,
                            Precond precond, RngStream& rng);

/// CNL / pCNL move. `grad` is dPhi/dz at u over active modes.
CoefficientState propose_langevin(const CoefficientState& u,
                                  const SpectralPrior& prior, double delta,
                                  bool preconditioned,
                                  const std::vector<double>& grad,
                                  RngStream& rng);

/// Draws the effective step scale for one step when a random-scale law is
/// configured; otherwise returns config.delta. The draw is independent of
/// state and proposal noise, so the acceptance rule is unchanged.
double random_delta_wrap(const ProposalConfig& config, RngStream& rng);

}  // namespace fsmcmc
