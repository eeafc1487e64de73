#pragma once

#include <string>
#include <vector>

namespace twophase {

/// Outcome of one acceptance criterion or invariant suite. Tolerances and
/// budgets are pinned inside the implementation, not configurable: the point
/// of the gate is that it cannot be loosened from the outside.
struct CriterionResult {
  int id = 0;
  std::string summary;
  bool pass = false;
  double elapsed_s = 0.0;
  std::string details;  ///< measured numbers, and failure notes when !pass
};

/// Hooks used by the test harness to demonstrate that the suite actually
/// detects broken invariants; all-default options leave behavior unchanged.
struct SelftestOptions {
  /// Added to the transmission constant fed into the radial glue residuals.
  /// Any nonzero value must make the glue suite fail.
  double mutate_transmission = 0.0;
  /// Overrides the angular quadrature order of the orthonormality suite
  /// (0 = documented default). Orders below the exactness threshold for the
  /// tested degrees must make the suite fail.
  int angular_order_override = 0;
};

/// The ten acceptance criteria, each timed against its wall-clock budget.
/// A criterion passes only if its numeric checks hold AND it finishes within
/// budget.
std::vector<CriterionResult> run_acceptance();

/// Acceptance criteria plus the cross-module invariant suites (radial glue,
/// quadrature foundations with the override hook, linearized-mode boundary
/// systems, branch parity, interior equation exactness, counterexample
/// certificates, identity translation invariance).
std::vector<CriterionResult> run_selftest(const SelftestOptions& options = {});

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace twophase
