#pragma once

#include <string>
#include <vector>

#include "vkplate/equilibrium.hpp"

namespace vkplate {

/// Shared settings of the property suites.
struct VerifyContext {
  PlateConfig plate;  ///< sigma, ell, eps; k, delta and lambda are set per suite
  int M = 16;
  int N = 48;
  SolverOptions solver;
};

struct SuiteResult {
  std::string name;
  int criterion = 0;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Names in run order: lambda1, spectrum, trilinear, dfunctional, gradient,
/// uniqueness, pitchfork, multiplicity, loaded, hangers, poincare.
const std::vector<std::string>& suite_names();

/// Runs one suite. Unknown names throw ParameterError. Numerical failures
/// inside a suite are reported as a failed result, not thrown.
SuiteResult run_suite(const std::string& name, const VerifyContext& ctx);

}  // namespace vkplate
