#pragma once

namespace fsmcmc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fsmcmc
