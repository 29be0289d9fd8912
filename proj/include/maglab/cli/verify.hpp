#pragma once

#include <string>
#include <vector>

#include "maglab/eigensolve.hpp"
#include "maglab/grid.hpp"
#include "maglab/weights.hpp"

namespace maglab::cli {

struct SuiteCase {
  std::string name;
  DomainSpec domain;
  Weight weight;
  double n;
};

/// The (domain, weight, n) combinations the invariant checks run over.
std::vector<SuiteCase> shipped_suite();

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  ///< the checked quantity (a margin, ratio or error)
  double limit = 0.0;  ///< the threshold it is compared against
  std::string detail;
};

struct VerifyOptions {
  double h = 1.0 / 32;          ///< grid for the suite-wide checks
  double poincare_h = 1.0 / 64;
  double flux_h = 1.0 / 16;
  int oracle_instances = 10;
  std::uint64_t oracle_seed = 20240601;
  SolverOpts solver;
  int workers = 1;
};

/// Kato, subharmonic floor, monotonicity in n, flux periodicity, Poincare and
/// dense-oracle equivalence. Results are ordered deterministically.
std::vector<CheckResult> run_verify(const VerifyOptions& opts = {});

}  // namespace maglab::cli
