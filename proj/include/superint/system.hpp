#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "superint/expr.hpp"

namespace superint {

enum class KillingKind { Proper, Conformal };

std::string to_string(KillingKind k);

/// A declared (conformal) Killing tensor: n*n expression matrix, row-major.
struct KillingDecl {
  KillingKind kind = KillingKind::Proper;
  std::vector<Expr> entries;
  std::string label;

  const Expr& at(std::size_t i, std::size_t j, std::size_t n) const { return entries[i * n + j]; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Numerical thresholds. Check tolerances default to `identity` except for
/// the names listed in `per_check`.
struct Tolerances {
  double identity = 1e-8;
  double jet_solve = 1e-6;
  double rank = 1e-8;
  double vote = 0.75;
  double exclusion = 1e-3;
  double condition = 1e12;
  double properness = 1e-9;
  std::map<std::string, double> per_check;

  /// Tolerance for a named check; falls back to `fallback`.
  double for_check(const std::string& name, double fallback) const;
  /// Apply NAME=VALUE; NAME may be a check name or one of the scalar fields.
  void set(const std::string& name, double value);
};

struct SystemDef {
  std::string name;
  std::size_t n = 0;
  std::vector<std::string> coords;
  std::vector<Expr> metric;           // n*n, row-major, symmetric by construction
  std::vector<Expr> basis;            // parameter-free potentials
  std::vector<std::string> basis_labels;
  std::vector<Interval> domain;
  std::vector<Expr> excluded;
  std::vector<KillingDecl> killing;
  Tolerances tolerances;

  const Expr& metric_entry(std::size_t i, std::size_t j) const { return metric[i * n + j]; }
  bool has_potential() const { return !basis.empty(); }
};

/// Check the SystemDef invariants; throws ValidationError.
void validate_system(const SystemDef& sys);

/// Deterministic sampler: uniform in the domain box, rejecting points where an
/// excluded expression is smaller than `tolerances.exclusion` in magnitude or
/// where any metric/basis expression leaves its domain.
class PointSampler {
 public:
  PointSampler(const SystemDef& sys, std::uint64_t seed);

  /// Next accepted point, or nullopt after `max_attempts` consecutive
  /// rejections.
  std::optional<std::vector<double>> next(std::size_t max_attempts = 10000);
  std::size_t rejected() const noexcept { return rejected_; }

 private:
  double uniform01();
  bool acceptable(const std::vector<double>& x) const;

  const SystemDef& sys_;
  std::uint64_t state_;
  std::size_t rejected_ = 0;
};

/// `count` accepted points; throws Error when the domain rejects everything.
std::vector<std::vector<double>> sample_points(const SystemDef& sys, std::size_t count,
                                               std::uint64_t seed);

/// True when `x` lies in the closed domain box.
bool in_domain(const SystemDef& sys, const std::vector<double>& x);

}  // namespace superint
