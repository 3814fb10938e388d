#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fsmcmc/rng.hpp"

namespace fsmcmc {

/// Whitened representation of a random field: z[i] is a standard-normal
/// coordinate, the field coefficient is xi_i = lambda_i * z[i]. At most one
/// of `trunc` (random-truncation level, 1-based, modes 0..trunc-1 active)
/// and `switches` (per-mode on/off) may be present.
struct CoefficientState {
  std::vector<double> z;
  std::optional<std::size_t> trunc;
  std::optional<std::vector<std::uint8_t>> switches;

  bool is_active(std::size_t i) const {
    if (trunc) return i < *trunc;
    if (switches) return (*switches)[i] != 0;
    return true;
  }
  std::size_t active_count() const;
  void validate_shape() const;  // throws std::invalid_argument on bad masks
};

enum class BasisKind { kFourier1d, kFourier2d, kStokesDivFree };

/// Gaussian random-field prior N(0, C) diagonalized in a Fourier basis.
///
/// Eigenvalues (variances lambda_i^2) in the canonical ordering:
///   - fourier1d on [-ell, ell]: modes ordered constant, cos(1), sin(1),
///     cos(2), ...; lambda_i^2 = scale * i^(-2 alpha) with i = 1, 2, ...
///   - fourier2d on the unit square/torus: modes ordered by p^2 + q^2,
///     ties lexicographic in (p, q), cosine before sine; the (0,0) mode has
///     weight 1 and lambda_{p,q}^2 = scale * (p^2 + q^2)^(-2 alpha).
///   - stokes_div_free on the unit torus, (0,0) excluded:
///     lambda_k^2 = scale * (nu (p^2 + q^2))^(-alpha), matching
///     N(0, scale * A^(-alpha)) for the Stokes operator A with |k|^2
///     counted in squared-index units (the 2 pi factors of the spatial
///     frequency are absorbed into nu).
/// The constructor rejects alpha <= 1 (trace-class gate) for every basis.
class SpectralPrior {
 public:
  struct Mode2d {
    int p = 0;
    int q = 0;
    bool sine = false;  // false: cosine component, true: sine component
  };

  static SpectralPrior fourier1d(double alpha, double scale,
                                 double half_length, std::size_t mode_count);
  static SpectralPrior fourier2d(double alpha, double scale,
                                 std::size_t mode_count);
  static SpectralPrior stokes_div_free(double alpha, double scale,
                                       double viscosity,
                                       std::size_t mode_count);

  BasisKind basis() const { return basis_; }
  int dims() const { return basis_ == BasisKind::kFourier1d ? 1 : 2; }
  std::size_t mode_count() const { return lambda_sq_.size(); }
  double alpha() const { return alpha_; }
  double scale() const { return scale_; }
  double half_length() const { return half_length_; }
  double viscosity() const { return viscosity_; }

  /// First n eigenvalues lambda_i^2; throws std::out_of_range unless
  /// 1 <= n <= mode_count.
  std::vector<double> eigenvalues(std::size_t n) const;
  double eigenvalue(std::size_t i) const { return lambda_sq_[i]; }
  double mode_std(std::size_t i) const { return lambda_[i]; }
  const std::vector<double>& mode_stds() const { return lambda_; }
  double trace() const;

  /// Wavevector table for the 2-D bases ((0,0) entry present only for
  /// fourier2d).
  const std::vector<Mode2d>& modes2d() const;

  /// Orthonormal scalar basis functions (fourier1d / fourier2d only).
  double basis_value(std::size_t i, double x) const;
  double basis_value(std::size_t i, double x1, double x2) const;

  /// i.i.d. standard-normal coordinates; no masks.
  CoefficientState sample(RngStream& rng) const;

  /// u(x) = sum over active modes of lambda_i z_i phi_i(x). Throws
  /// std::domain_error for points outside the declared domain.
  double synthesize_at(const CoefficientState& state, double x) const;
  double synthesize_at(const CoefficientState& state, double x1,
                       double x2) const;
  std::vector<double> synthesize(const CoefficientState& state,
                                 std::span<const double> grid) const;

 private:
  SpectralPrior() = default;

  BasisKind basis_ = BasisKind::kFourier1d;
  double alpha_ = 0.0;
  double scale_ = 0.0;
  double half_length_ = 0.0;  // fourier1d
  double viscosity_ = 0.0;    // stokes_div_free
  std::vector<double> lambda_sq_;
  std::vector<double> lambda_;
  std::vector<Mode2d> modes2d_;
};

/// Zeroes coefficients with index >= d (d is 1-based like trunc levels);
/// masks are carried through unchanged.
CoefficientState project(const CoefficientState& state, std::size_t d);

/// (1/2) sum over active modes of z_i^2.
double prior_sq_norm(const CoefficientState& state);

/// Exponential prior p(i) proportional to exp(-rate * i) on 1..mode_count,
/// renormalized after truncation.
class TruncationLaw {
 public:
  TruncationLaw(double rate, std::size_t mode_count);

  double rate() const { return rate_; }
  std::size_t mode_count() const { return cdf_.size(); }
  double pmf(std::size_t level) const;      // level in 1..mode_count
  double log_pmf(std::size_t level) const;  // log of the normalized pmf
  std::size_t sample(RngStream& rng) const;

 private:
  double rate_ = 0.0;
  double log_norm_ = 0.0;
  std::vector<double> cdf_;
};

/// Sieve switch prior: log-density relative to the fair-Bernoulli
/// reference is -rate * (number of active switches), up to a constant.
struct SieveLaw {
  double rate = 0.0;
};

double sieve_log_prior(const std::vector<std::uint8_t>& switches,
                       const SieveLaw& law);

}  // namespace fsmcmc
