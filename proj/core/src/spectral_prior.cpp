#include "fsmcmc/spectral_prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace fsmcmc {

namespace {

void check_common(double alpha, double scale, std::size_t mode_count) {
  if (!(alpha > 1.0))
    throw std::invalid_argument(
        "SpectralPrior: trace-class condition requires alpha > 1");
  if (!(scale > 0.0))
    throw std::invalid_argument("SpectralPrior: scale must be > 0");
  if (mode_count < 1)
    throw std::invalid_argument("SpectralPrior: mode_count must be >= 1");
}

// Half-lattice representatives of +/-(p,q), ordered by p^2+q^2 then (p,q);
// cosine entry precedes sine entry. include_zero adds the constant (0,0)
// mode in front.
std::vector<SpectralPrior::Mode2d> build_modes2d(std::size_t mode_count,
                                                 bool include_zero) {
  std::vector<std::pair<int, int>> reps;
  int radius = 1;
  const std::size_t pairs_needed = mode_count;  // generous upper bound
  while (reps.size() < pairs_needed) {
    reps.clear();
    for (int p = 0; p <= radius; ++p) {
      for (int q = -radius; q <= radius; ++q) {
        if (p == 0 && q <= 0) continue;  // representative: p>0, or p==0,q>0
        if (p * p + q * q <= radius * radius) reps.emplace_back(p, q);
      }
    }
    radius *= 2;
  }
  std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) {
    const int na = a.first * a.first + a.second * a.second;
    const int nb = b.first * b.first + b.second * b.second;
    return std::tie(na, a.first, a.second) < std::tie(nb, b.first, b.second);
  });

  std::vector<SpectralPrior::Mode2d> modes;
  modes.reserve(mode_count);
  if (include_zero) modes.push_back({0, 0, false});
  for (const auto& [p, q] : reps) {
    if (modes.size() >= mode_count) break;
    modes.push_back({p, q, false});
    if (modes.size() >= mode_count) break;
    modes.push_back({p, q, true});
  }
  return modes;
}

}  // namespace

std::size_t CoefficientState::active_count() const {
  if (trunc) return std::min(*trunc, z.size());
  if (!switches) return z.size();
  std::size_t n = 0;
  for (auto s : *switches) n += (s != 0);
  return n;
}

void CoefficientState::validate_shape() const {
  if (trunc && switches)
    throw std::invalid_argument(
        "CoefficientState: at most one of trunc/switches may be present");
  if (trunc && (*trunc < 1 || *trunc > z.size()))
    throw std::invalid_argument(
        "CoefficientState: trunc must lie in [1, mode_count]");
  if (switches && switches->size() != z.size())
    throw std::invalid_argument(
        "CoefficientState: switches length must equal mode_count");
}

SpectralPrior SpectralPrior::fourier1d(double alpha, double scale,
                                       double half_length,
                                       std::size_t mode_count) {
  check_common(alpha, scale, mode_count);
  if (!(half_length > 0.0))
    throw std::invalid_argument("SpectralPrior: half_length must be > 0");
  SpectralPrior prior;
  prior.basis_ = BasisKind::kFourier1d;
  prior.alpha_ = alpha;
  prior.scale_ = scale;
  prior.half_length_ = half_length;
  prior.lambda_sq_.resize(mode_count);
  prior.lambda_.resize(mode_count);
  for (std::size_t i = 0; i < mode_count; ++i) {
    const double w = std::pow(static_cast<double>(i + 1), -2.0 * alpha);
    prior.lambda_sq_[i] = scale * w;
    prior.lambda_[i] = std::sqrt(prior.lambda_sq_[i]);
  }
  return prior;
}

SpectralPrior SpectralPrior::fourier2d(double alpha, double scale,
                                       std::size_t mode_count) {
  check_common(alpha, scale, mode_count);
  SpectralPrior prior;
  prior.basis_ = BasisKind::kFourier2d;
  prior.alpha_ = alpha;
  prior.scale_ = scale;
  prior.modes2d_ = build_modes2d(mode_count, /*include_zero=*/true);
  prior.lambda_sq_.resize(mode_count);
  prior.lambda_.resize(mode_count);
  for (std::size_t i = 0; i < mode_count; ++i) {
    const auto& m = prior.modes2d_[i];
    const double n2 = static_cast<double>(m.p * m.p + m.q * m.q);
    const double w = (n2 == 0.0) ? 1.0 : std::pow(n2, -2.0 * alpha);
    prior.lambda_sq_[i] = scale * w;
    prior.lambda_[i] = std::sqrt(prior.lambda_sq_[i]);
  }
  return prior;
}

SpectralPrior SpectralPrior::stokes_div_free(double alpha, double scale,
                                             double viscosity,
                                             std::size_t mode_count) {
  check_common(alpha, scale, mode_count);
  if (!(viscosity > 0.0))
    throw std::invalid_argument("SpectralPrior: viscosity must be > 0");
  SpectralPrior prior;
  prior.basis_ = BasisKind::kStokesDivFree;
  prior.alpha_ = alpha;
  prior.scale_ = scale;
  prior.viscosity_ = viscosity;
  prior.modes2d_ = build_modes2d(mode_count, /*include_zero=*/false);
  prior.lambda_sq_.resize(mode_count);
  prior.lambda_.resize(mode_count);
  for (std::size_t i = 0; i < mode_count; ++i) {
    const auto& m = prior.modes2d_[i];
    const double k2 = static_cast<double>(m.p * m.p + m.q * m.q);
    prior.lambda_sq_[i] = scale * std::pow(viscosity * k2, -alpha);
    prior.lambda_[i] = std::sqrt(prior.lambda_sq_[i]);
  }
  return prior;
}

std::vector<double> SpectralPrior::eigenvalues(std::size_t n) const {
  if (n < 1 || n > mode_count())
    throw std::out_of_range("eigenvalues: n must lie in [1, mode_count]");
  return {lambda_sq_.begin(), lambda_sq_.begin() + static_cast<long>(n)};
}

double SpectralPrior::trace() const {
  return std::accumulate(lambda_sq_.begin(), lambda_sq_.end(), 0.0);
}

const std::vector<SpectralPrior::Mode2d>& SpectralPrior::modes2d() const {
  if (basis_ == BasisKind::kFourier1d)
    throw std::logic_error("modes2d: prior has a 1-D basis");
  return modes2d_;
}

double SpectralPrior::basis_value(std::size_t i, double x) const {
  if (basis_ != BasisKind::kFourier1d)
    throw std::logic_error("basis_value(x): prior is not fourier1d");
  const double ell = half_length_;
  if (i == 0) return 1.0 / std::sqrt(2.0 * ell);
  const std::size_t k = (i + 1) / 2;
  const double arg = static_cast<double>(k) * M_PI * x / ell;
  const double norm = 1.0 / std::sqrt(ell);
  return (i % 2 == 1) ? norm * std::cos(arg) : norm * std::sin(arg);
}

double SpectralPrior::basis_value(std::size_t i, double x1, double x2) const {
  if (basis_ != BasisKind::kFourier2d)
    throw std::logic_error("basis_value(x1,x2): prior is not fourier2d");
  const auto& m = modes2d_[i];
  if (m.p == 0 && m.q == 0) return 1.0;
  const double arg = 2.0 * M_PI * (m.p * x1 + m.q * x2);
  const double norm = std::sqrt(2.0);
  return m.sine ? norm * std::sin(arg) : norm * std::cos(arg);
}

CoefficientState SpectralPrior::sample(RngStream& rng) const {
  CoefficientState state;
  state.z.resize(mode_count());
  for (auto& zi : state.z) zi = rng.normal();
  return state;
}

double SpectralPrior::synthesize_at(const CoefficientState& state,
                                    double x) const {
  if (std::abs(x) > half_length_)
    throw std::domain_error("synthesize_at: point outside [-ell, ell]");
  double acc = 0.0;
  const std::size_t n = std::min(state.z.size(), mode_count());
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.is_active(i)) continue;
    acc += lambda_[i] * state.z[i] * basis_value(i, x);
  }
  return acc;
}

double SpectralPrior::synthesize_at(const CoefficientState& state, double x1,
                                    double x2) const {
  if (x1 < 0.0 || x1 > 1.0 || x2 < 0.0 || x2 > 1.0)
    throw std::domain_error("synthesize_at: point outside the unit square");
  double acc = 0.0;
  const std::size_t n = std::min(state.z.size(), mode_count());
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.is_active(i)) continue;
    acc += lambda_[i] * state.z[i] * basis_value(i, x1, x2);
  }
  return acc;
}

std::vector<double> SpectralPrior::synthesize(
    const CoefficientState& state, std::span<const double> grid) const {
  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g)
    values[g] = synthesize_at(state, grid[g]);
  return values;
}

CoefficientState project(const CoefficientState& state, std::size_t d) {
  if (d < 1 || d > state.z.size())
    throw std::out_of_range("project: d must lie in [1, mode_count]");
  CoefficientState out = state;
  std::fill(out.z.begin() + static_cast<long>(d), out.z.end(), 0.0);
  return out;
}

double prior_sq_norm(const CoefficientState& state) {
  double acc = 0.0;
  for (std::size_t i = 0; i < state.z.size(); ++i)
    if (state.is_active(i)) acc += state.z[i] * state.z[i];
  return 0.5 * acc;
}

TruncationLaw::TruncationLaw(double rate, std::size_t mode_count)
    : rate_(rate) {
  if (!(rate > 0.0))
    throw std::invalid_argument("TruncationLaw: rate must be > 0");
  if (mode_count < 1)
    throw std::invalid_argument("TruncationLaw: mode_count must be >= 1");
  // p(i) ~ exp(-rate*i); accumulate exp(-rate*(i-1)) for stability, the
  // common factor cancels in normalization.
  cdf_.resize(mode_count);
  double acc = 0.0;
  for (std::size_t i = 0; i < mode_count; ++i) {
    acc += std::exp(-rate * static_cast<double>(i));
    cdf_[i] = acc;
  }
  const double total = cdf_.back();
  for (auto& c : cdf_) c /= total;
  log_norm_ = std::log(total) - rate;  // log sum of exp(-rate*i), i=1..N
}

double TruncationLaw::pmf(std::size_t level) const {
  return std::exp(log_pmf(level));
}

double TruncationLaw::log_pmf(std::size_t level) const {
  if (level < 1 || level > cdf_.size())
    throw std::out_of_range("TruncationLaw: level out of range");
  return -rate_ * static_cast<double>(level) - log_norm_;
}

std::size_t TruncationLaw::sample(RngStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf_.begin());
  return std::min(idx, cdf_.size() - 1) + 1;
}

double sieve_log_prior(const std::vector<std::uint8_t>& switches,
                       const SieveLaw& law) {
  std::size_t on = 0;
  for (auto s : switches) on += (s != 0);
  return -law.rate * static_cast<double>(on);
}

}  // namespace fsmcmc
