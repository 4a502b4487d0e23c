#pragma once

// Pointwise Riemannian and affine geometry: metric data, Christoffel symbols,
// the connection induced by a structure tensor, curvature and its
// contractions, covariant derivatives.
//
// Index layout conventions (derivative slot always first):
//   dg(k, i, j)        = d_k g_ij
//   d2g(k, l, i, j)    = d_k d_l g_ij
//   dg_inv(k, i, j)    = d_k g^{ij}
//   gamma(k, i, j)     = Gamma^k_ij
//   dgamma(l, k, i, j) = d_l Gamma^k_ij
//   R(b, i, j, k)      = R^b_ijk
//                      = d_j G^b_ki - d_k G^b_ji + G^b_ja G^a_ki - G^b_ka G^a_ji
// so that Ric_ij = R^b_ibj is positive on the round sphere.

#include <span>
#include <vector>

#include "superint/jet.hpp"
#include "superint/system.hpp"
#include "superint/tensor.hpp"

namespace superint {

struct MetricPointData {
  DenseTensor g;       // (L, L)
  DenseTensor g_inv;   // (U, U)
  DenseTensor dg;      // (L, L, L)
  DenseTensor d2g;     // (L, L, L, L)
  DenseTensor dg_inv;  // (L, U, U)
  double condition = 0.0;

  std::size_t dim() const { return g.dim(); }
};

struct ConnectionPointData {
  DenseTensor gamma;   // (U, L, L)
  DenseTensor dgamma;  // (L, U, L, L)
};

/// A tensor value at a point together with its first partial derivatives;
/// `partials` has one extra leading lower slot.
struct TensorField {
  DenseTensor value;
  DenseTensor partials;
};

struct CurvatureBundle {
  DenseTensor R;      // R^b_ijk      (U, L, L, L)
  DenseTensor Riem;   // Riem_aijk = g_ab R^b_ijk
  DenseTensor Ric;    // Ric_ij = R^b_ibj
  double scal = 0.0;  // g^{ij} Ric_ij
  DenseTensor B_up;   // B^b_k = g^{ij} R^b_ijk  (U, L)
  DenseTensor B;      // B_ij = g_ia B^a_j
  double trB = 0.0;   // g^{ij} B_ij
  DenseTensor Proj;   // Riem_ijkl - (Ric_jl g_ik - Ric_jk g_il)/(n-1)
};

MetricPointData metric_at(const SystemDef& sys, std::span<const double> point);
/// Metric data from a full n*n matrix of metric expressions.
MetricPointData metric_at(std::span<const Expr> metric, std::size_t n,
                          std::span<const double> point, double max_condition = 1e12);

/// Levi-Civita connection.
ConnectionPointData christoffel(const MetricPointData& m);

/// Sign of the structure tensor in the induced connection,
/// Gamma~^k_ij = Gamma^k_ij + sign * S_ij^k.
enum class InducedSign { Minus = -1, Plus = 1 };

/// Induced torsion-free connection from a structure tensor S_ij^k stored as
/// S(i, j, k) with (L, L, U) variance and partials (l, i, j, k).
/// Throws NumericError if S is not symmetric in (i, j).
ConnectionPointData induced_connection(const ConnectionPointData& lc, const TensorField& S,
                                       InducedSign sign);

DenseTensor curvature(const ConnectionPointData& c);

CurvatureBundle contractions(const DenseTensor& R, const MetricPointData& m);

struct CovariantHessian {
  DenseTensor hessian;  // (L, L)
  double laplacian = 0.0;
};

/// Hess_ij V = d_ij V - Gamma^a_ij d_a V and its g-trace.
CovariantHessian covariant_hessian(const Jet3& V, const ConnectionPointData& c,
                                   const MetricPointData& m);

/// d_k (Lap V) for the connection `c` (third derivatives of V, partials of
/// the connection and of g^{-1}).
std::vector<double> laplacian_gradient(const Jet3& V, const ConnectionPointData& c,
                                       const MetricPointData& m);

/// (nabla t)(k, ...) = nabla_k t_...; rank of t at most 3.
DenseTensor covariant_d(const TensorField& field, const ConnectionPointData& c);

/// (d omega)_ij = d_i omega_j - d_j omega_i for a one-form with partials.
DenseTensor exterior_d(const TensorField& oneform);

/// Levi-Civita metric data as a TensorField (value g, partials dg).
TensorField metric_field(const MetricPointData& m);

}  // namespace superint
