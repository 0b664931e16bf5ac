#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tl/solver.hpp"

namespace tl {

struct CheckResult {
  std::string suite;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;

  bool pass() const { return residual <= tolerance; }
};

struct VerifyOptions {
  int n_sites = 2;
  int twice_spin = 1;
  Complex q{0.5, 0.0};
  int q_branch = 0;
  /// Empty means a suite-specific default.
  std::vector<int> m_list;
  bool inhomogeneous = false;
  /// Random configurations per M for the offshell suite.
  int configurations = 50;
  SearchConfig search;
  std::uint64_t seed = 20160601;
};

const std::vector<std::string>& suite_names();

/// Runs one suite; throws UsageError for an unknown name.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& options);

/// max|a - b| / max(max|a|, max|b|).
double relative_residual(const Matrix& a, const Matrix& b);

}  // namespace tl
