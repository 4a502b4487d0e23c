#pragma once

// Pointwise identity checks and the suite that aggregates them over sample
// points. Every check reports max_abs / (1 + scale), where scale is the
// magnitude of the largest term entering the identity.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "superint/structure.hpp"
#include "superint/system.hpp"

namespace superint {

struct CheckResult {
  std::string name;
  std::string paper_ref;  // the identity being checked, as a formula
  double max_abs_residual = 0.0;
  double scale = 0.0;
  double rel_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::size_t points_evaluated = 0;
  /// Reported but excluded from the summary and the exit status.
  bool informational = false;
};

/// Fold `point` into `into` (same name): keeps the worst point's residuals.
void merge_result(CheckResult& into, const CheckResult& point);

std::vector<CheckResult> check_nondeg(const SystemDef& sys, std::span<const double> point);
std::vector<CheckResult> check_semideg(const SystemDef& sys, std::span<const double> point);

/// Levi-Civita checks that need no potential: first Bianchi identity and
/// Ricci symmetry.
std::vector<CheckResult> check_levi_civita(const SystemDef& sys, std::span<const double> point);

/// tau = 0 (eta = 0) at every point. pass == proper.
CheckResult check_properness(const SystemDef& sys, const std::vector<std::vector<double>>& points,
                             StructureMode mode);

/// Symmetrized Levi-Civita derivative of K (trace-free part for conformal).
CheckResult check_killing(const SystemDef& sys, const KillingDecl& K, std::span<const double> point);

/// Proper: d(K(dV)) = 0. Conformal: d(C(dV)) - V d rho - dV ^ rho = 0 with
/// rho = 2/(n+2) div C.
CheckResult check_bertrand_darboux(const SystemDef& sys, const KillingDecl& K,
                                   std::size_t basis_index, std::span<const double> point);

struct SuiteReport {
  std::string system;
  std::string mode;  // nondeg | semideg | higher | none
  std::uint64_t seed = 0;
  std::size_t points = 0;
  std::string sign_convention;
  std::string classification;  // NonDegenerate | SemiDegenerate | HigherDegeneracy | none
  std::vector<int> per_point_ranks;
  std::string properness;      // proper | conformal | n/a
  std::vector<CheckResult> results;      // counted
  std::vector<CheckResult> diagnostics;  // informational
  double condition_min = 0.0;
  double condition_max = 0.0;

  std::size_t passed() const;
  std::size_t failed() const;
  bool all_passed() const { return failed() == 0; }
};

std::string sign_convention_string();

SuiteReport run_suite(const SystemDef& sys, std::size_t npoints, std::uint64_t seed);

}  // namespace superint
