#include "fsmcmc/target.hpp"

#include <stdexcept>

namespace fsmcmc {

Target prior_target() {
  Target t;
  t.potential = [](const CoefficientState&) { return 0.0; };
  t.gradient = [](const CoefficientState& s) {
    return std::vector<double>(s.z.size(), 0.0);
  };
  return t;
}

std::vector<double> finite_difference_gradient(const Target& target,
                                               const CoefficientState& state,
                                               double h) {
  if (!(h > 0.0))
    throw std::invalid_argument("finite_difference_gradient: h must be > 0");
  std::vector<double> grad(state.z.size(), 0.0);
  CoefficientState probe = state;
  for (std::size_t i = 0; i < state.z.size(); ++i) {
    if (!state.is_active(i)) continue;
    probe.z[i] = state.z[i] + h;
    const double up = target.potential(probe);
    probe.z[i] = state.z[i] - h;
    const double down = target.potential(probe);
    probe.z[i] = state.z[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

Target with_fd_gradient(Target target, double h) {
  Target out = std::move(target);
  const Target base{out.potential, nullptr, out.misfit};
  out.gradient = [base, h](const CoefficientState& s) {
    return finite_difference_gradient(base, s, h);
  };
  return out;
}

}  // namespace fsmcmc
