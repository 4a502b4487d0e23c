#pragma once

// Pointwise extraction of the structure tensors from a potential basis.
//
// Non-degenerate:  Hess_ij V = T_ij^k d_k V + tau_ij V + (1/n) Lap V g_ij
// Semi-degenerate: Hess_ij V = D_ij^k d_k V + eta_ij V,
//                  Lap V = s^k d_k V + alpha V
// with Hess and Lap taken with the Levi-Civita connection.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superint/geometry.hpp"
#include "superint/system.hpp"
#include "superint/tensor.hpp"

namespace superint {

enum class StructureMode { NonDegenerate, SemiDegenerate };

std::string to_string(StructureMode m);

/// Sign used for the induced connection Gamma~ = Gamma + sign * T.
/// With this sign the induced Hessian absorbs the first-order term of the
/// structure equation: Hess~_ij V = tau_ij V + (1/n) Lap V g_ij.
inline constexpr InducedSign kInducedSign = InducedSign::Plus;

struct StructureSolution {
  StructureMode mode = StructureMode::NonDegenerate;
  DenseTensor T;               // T(i, j, k) = T_ij^k or D_ij^k   (L, L, U)
  DenseTensor tau;             // tau_ij or eta_ij                 (L, L)
  std::vector<double> s;       // semi-degenerate only, lower index
  double alpha = 0.0;          // semi-degenerate only
  double residual = 0.0;       // max scaled residual over all solves
  double condition = 0.0;      // condition number of the coefficient matrix
  std::optional<DenseTensor> dT;    // (l, i, j, k) = d_l T_ij^k
  std::optional<DenseTensor> dtau;  // (l, i, j) = d_l tau_ij

  /// T with partials; throws NumericError when partials were not computed.
  TensorField T_field() const;
  TensorField tau_field() const;
};

enum class DegeneracyKind { NonDegenerate, SemiDegenerate, HigherDegeneracy };

std::string to_string(DegeneracyKind k);

struct DegeneracyClass {
  DegeneracyKind kind = DegeneracyKind::HigherDegeneracy;
  int rank = 0;                        // majority rank
  std::vector<int> per_point_ranks;    // in point order
  double vote_fraction = 0.0;
  /// Fit of Lap V = s(dV) + alpha V at each point voting SemiDegenerate;
  /// empty entries elsewhere.
  std::vector<std::vector<double>> s;
  std::vector<double> alpha;
  double fit_residual = 0.0;           // max scaled residual of the (s, alpha) fit

  StructureMode mode() const;          // throws ClassificationError for higher degeneracy
};

/// Level-2 data of the basis at a point: jets and Levi-Civita Laplacians.
struct BasisPointData {
  MetricPointData metric;
  ConnectionPointData levi_civita;
  std::vector<Jet3> V;                 // one jet per basis element
  std::vector<CovariantHessian> hess;  // Levi-Civita Hessian and Laplacian
};

BasisPointData basis_at(const SystemDef& sys, std::span<const double> point);

/// Rank of the m x (n+2) matrix with rows (V, dV, Lap V) at one point.
int point_rank(const BasisPointData& d, double rank_tol);

struct SemiFit {
  std::vector<double> s;   // lower index
  double alpha = 0.0;
  double residual = 0.0;
};

/// Least-squares fit Lap V = g^{-1}(s, dV) + alpha V over the basis.
SemiFit fit_semi_degeneracy(const BasisPointData& d);

DegeneracyClass classify_degeneracy(const SystemDef& sys,
                                    const std::vector<std::vector<double>>& points);

StructureSolution solve_structure_point(const SystemDef& sys, std::span<const double> point,
                                        StructureMode mode);

/// As solve_structure_point, with first partials of T and tau.
StructureSolution structure_jet(const SystemDef& sys, std::span<const double> point,
                                StructureMode mode);

struct InducedConnection {
  BasisPointData basis;
  StructureSolution structure;
  ConnectionPointData connection;
};

InducedConnection build_connection(const SystemDef& sys, std::span<const double> point,
                                   StructureMode mode, InducedSign sign = kInducedSign);

/// ||A x - b|| / (1 + ||A|| ||x|| + ||b||), Frobenius/Euclidean norms.
double scaled_residual(double abs_residual, double norm_a, double norm_x, double norm_b);

}  // namespace superint
