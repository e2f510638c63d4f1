#pragma once

// Randomized property suites shared by the unit tests and the acceptance
// binary. Each returns how many trials ran, how many failed and the worst
// error-to-tolerance ratio seen.

#include <cstdint>
#include <string>
#include <vector>

namespace lrexp::testing {

struct SuiteResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst_ratio = 0.0;  // max over checks of error / tolerance
  std::string first_failure;

  bool passed() const { return trials > 0 && failures == 0; }
  void record(double error, double tol, const std::string& what);
};

/// Projected steppers at full rank and full Krylov dimension against the dense
/// exponential Euler / Runge / non-strict Runge maps (tolerance 1e-9).
SuiteResult degeneracy_suite(int trials, std::uint64_t seed);

/// Reduced order-1/2 solves against adaptive Dormand-Prince integration of the
/// reduced IVP (tolerance 1e-9), including near-singular Sylvester operators.
SuiteResult reduced_solver_suite(int trials, std::uint64_t seed);

SuiteResult truncation_inequality_suite(int trials, std::uint64_t seed);
SuiteResult best_approximation_suite(int trials, std::uint64_t seed);
SuiteResult phi_recurrence_suite();
SuiteResult tangent_projection_suite(int trials, std::uint64_t seed);
SuiteResult arithmetic_suite(int trials, std::uint64_t seed);
SuiteResult krylov_exactness_suite(int trials, std::uint64_t seed);

/// All suites behind the property criterion.
std::vector<SuiteResult> property_suites(std::uint64_t seed);

}  // namespace lrexp::testing
