#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fsmcmc {

struct SuiteResult {
  std::string suite;
  bool pass = false;
  nlohmann::json stats;
};

std::vector<std::string> available_suites();

/// Runs one named invariant suite at full scale. Unknown names throw
/// std::invalid_argument listing the available suites; check failures are
/// reported in the result, not thrown.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

}  // namespace fsmcmc
