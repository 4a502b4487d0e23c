#include "superint/structure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "superint/error.hpp"

namespace superint {

namespace {

constexpr Variance L = Variance::Lower;
constexpr Variance U = Variance::Upper;

using Mat = Eigen::MatrixXd;

double condition_of(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(sv.size() - 1);
}

// Rows (dV_1 .. dV_n, V) for each basis element.
Mat first_order_matrix(const BasisPointData& d) {
  const std::size_t n = d.metric.dim();
  Mat a(d.V.size(), n + 1);
  for (std::size_t r = 0; r < d.V.size(); ++r) {
    for (std::size_t k = 0; k < n; ++k) a(r, k) = d.V[r].grad(k);
    a(r, n) = d.V[r].value();
  }
  return a;
}

std::vector<std::pair<std::size_t, std::size_t>> index_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

double max_column_residual(const Mat& a, const Mat& x, const Mat& b) {
  const double na = a.norm();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    const double r = (a * x.col(c) - b.col(c)).norm();
    worst = std::max(worst, scaled_residual(r, na, x.col(c).norm(), b.col(c).norm()));
  }
  return worst;
}

StructureSolution solve_impl(const SystemDef& sys, const BasisPointData& d, StructureMode mode,
                             bool with_partials) {
  const std::size_t n = d.metric.dim();
  const std::size_t m = d.V.size();
  const bool nondeg = mode == StructureMode::NonDegenerate;
  const double inv_n = 1.0 / static_cast<double>(n);
  if (m < n + 1) throw NumericError("structure solve: basis has fewer than n+1 elements");

  const Mat a = first_order_matrix(d);
  const auto pairs = index_pairs(n);
  Mat b(m, pairs.size());
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      double v = d.hess[r].hessian(i, j);
      if (nondeg) v -= inv_n * d.hess[r].laplacian * d.metric.g(i, j);
      b(r, p) = v;
    }

  StructureSolution sol;
  sol.mode = mode;
  sol.condition = condition_of(a);
  if (!(sol.condition <= sys.tolerances.condition)) {
    throw NumericError("structure solve: coefficient matrix is rank deficient at this point (condition " +
                       std::to_string(sol.condition) + "); resample");
  }
  const Eigen::ColPivHouseholderQR<Mat> qr(a);
  const Mat x = qr.solve(b);
  sol.residual = max_column_residual(a, x, b);

  sol.T = DenseTensor(n, {L, L, U});
  sol.tau = DenseTensor(n, {L, L});
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    for (std::size_t k = 0; k < n; ++k) {
      sol.T(i, j, k) = x(k, p);
      sol.T(j, i, k) = x(k, p);
    }
    sol.tau(i, j) = x(n, p);
    sol.tau(j, i) = x(n, p);
  }

  if (!nondeg) {
    const SemiFit fit = fit_semi_degeneracy(d);
    sol.s = fit.s;
    sol.alpha = fit.alpha;
    sol.residual = std::max(sol.residual, fit.residual);
  }

  if (!with_partials) return sol;

  // Differentiated least squares:
  // x' = A^+ (b' - A' x) + (A^T A)^{-1} A'^T (b - A x).
  std::vector<std::vector<double>> lap_grad(m);
  if (nondeg)
    for (std::size_t r = 0; r < m; ++r) lap_grad[r] = laplacian_gradient(d.V[r], d.levi_civita, d.metric);
  const Mat resid = b - a * x;
  const Eigen::LDLT<Mat> normal((a.transpose() * a).eval());
  const auto& G = d.levi_civita.gamma;
  const auto& dG = d.levi_civita.dgamma;
  DenseTensor dT(n, {L, L, L, U});
  DenseTensor dtau(n, {L, L, L});
  for (std::size_t l = 0; l < n; ++l) {
    Mat da(m, n + 1);
    Mat db(m, pairs.size());
    for (std::size_t r = 0; r < m; ++r) {
      const Jet3& V = d.V[r];
      for (std::size_t k = 0; k < n; ++k) da(r, k) = V.hess(l, k);
      da(r, n) = V.grad(l);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        double v = V.third(l, i, j);
        for (std::size_t q = 0; q < n; ++q) v -= dG(l, q, i, j) * V.grad(q) + G(q, i, j) * V.hess(q, l);
        if (nondeg) {
          v -= inv_n * (lap_grad[r][l] * d.metric.g(i, j) + d.hess[r].laplacian * d.metric.dg(l, i, j));
        }
        db(r, p) = v;
      }
    }
    const Mat dx = qr.solve((db - da * x).eval()) + normal.solve((da.transpose() * resid).eval());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      for (std::size_t k = 0; k < n; ++k) {
        dT(l, i, j, k) = dx(k, p);
        dT(l, j, i, k) = dx(k, p);
      }
      dtau(l, i, j) = dx(n, p);
      dtau(l, j, i) = dx(n, p);
    }
  }
  sol.dT = std::move(dT);
  sol.dtau = std::move(dtau);
  return sol;
}

}  // namespace

std::string to_string(StructureMode m) {
  return m == StructureMode::NonDegenerate ? "nondeg" : "semideg";
}

std::string to_string(DegeneracyKind k) {
  switch (k) {
    case DegeneracyKind::NonDegenerate: return "NonDegenerate";
    case DegeneracyKind::SemiDegenerate: return "SemiDegenerate";
    case DegeneracyKind::HigherDegeneracy: return "HigherDegeneracy";
  }
  return "?";
}

TensorField StructureSolution::T_field() const {
  if (!dT) throw NumericError("structure solution carries no partial derivatives");
  return TensorField{T, *dT};
}

TensorField StructureSolution::tau_field() const {
  if (!dtau) throw NumericError("structure solution carries no partial derivatives");
  return TensorField{tau, *dtau};
}

StructureMode DegeneracyClass::mode() const {
  switch (kind) {
    case DegeneracyKind::NonDegenerate: return StructureMode::NonDegenerate;
    case DegeneracyKind::SemiDegenerate: return StructureMode::SemiDegenerate;
    case DegeneracyKind::HigherDegeneracy: break;
  }
  throw ClassificationError("potential of higher degeneracy (rank " + std::to_string(rank) +
                            "); no structure equations are available");
}

double scaled_residual(double abs_residual, double norm_a, double norm_x, double norm_b) {
  return abs_residual / (1.0 + norm_a * norm_x + norm_b);
}

BasisPointData basis_at(const SystemDef& sys, std::span<const double> point) {
  BasisPointData d{metric_at(sys, point), {}, {}, {}};
  d.levi_civita = christoffel(d.metric);
  d.V.reserve(sys.basis.size());
  for (const auto& e : sys.basis) {
    d.V.push_back(eval_jet(e, point));
    d.hess.push_back(covariant_hessian(d.V.back(), d.levi_civita, d.metric));
  }
  return d;
}

int point_rank(const BasisPointData& d, double rank_tol) {
  const std::size_t n = d.metric.dim();
  Mat a(d.V.size(), n + 2);
  for (std::size_t r = 0; r < d.V.size(); ++r) {
    a(r, 0) = d.V[r].value();
    for (std::size_t k = 0; k < n; ++k) a(r, k + 1) = d.V[r].grad(k);
    a(r, n + 1) = d.hess[r].laplacian;
  }
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_tol * sv(0)) ++rank;
  return rank;
}

SemiFit fit_semi_degeneracy(const BasisPointData& d) {
  const std::size_t n = d.metric.dim();
  const Mat a = first_order_matrix(d);
  Eigen::VectorXd b(d.V.size());
  for (std::size_t r = 0; r < d.V.size(); ++r) b(r) = d.hess[r].laplacian;
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  SemiFit fit;
  fit.s.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) fit.s[i] += d.metric.g(i, k) * x(k);
  fit.alpha = x(n);
  fit.residual = scaled_residual((a * x - b).norm(), a.norm(), x.norm(), b.norm());
  return fit;
}

DegeneracyClass classify_degeneracy(const SystemDef& sys,
                                    const std::vector<std::vector<double>>& points) {
  if (points.size() < 8) {
    throw ClassificationError("classification needs at least 8 valid points, got " +
                              std::to_string(points.size()));
  }
  const std::size_t n = sys.n;
  DegeneracyClass cls;
  std::map<int, std::size_t> votes;
  std::vector<BasisPointData> data;
  data.reserve(points.size());
  for (const auto& p : points) {
    data.push_back(basis_at(sys, p));
    const int r = point_rank(data.back(), sys.tolerances.rank);
    cls.per_point_ranks.push_back(r);
    ++votes[r];
  }
  std::size_t best = 0;
  bool tie = false;
  for (const auto& [r, c] : votes) {
    if (c > best) {
      best = c;
      cls.rank = r;
      tie = false;
    } else if (c == best) {
      tie = true;
    }
  }
  cls.vote_fraction = static_cast<double>(best) / static_cast<double>(points.size());
  if (tie || cls.vote_fraction < sys.tolerances.vote) {
    std::string table;
    for (const auto& [r, c] : votes) table += " rank " + std::to_string(r) + ": " + std::to_string(c);
    throw ClassificationError("inconclusive classification;" + table);
  }
  if (cls.rank == static_cast<int>(n + 2)) {
    cls.kind = DegeneracyKind::NonDegenerate;
  } else if (cls.rank == static_cast<int>(n + 1)) {
    cls.kind = DegeneracyKind::SemiDegenerate;
  } else {
    cls.kind = DegeneracyKind::HigherDegeneracy;
  }
  cls.s.resize(points.size());
  cls.alpha.assign(points.size(), 0.0);
  if (cls.kind == DegeneracyKind::SemiDegenerate) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (cls.per_point_ranks[i] != cls.rank) continue;
      SemiFit fit = fit_semi_degeneracy(data[i]);
      cls.s[i] = std::move(fit.s);
      cls.alpha[i] = fit.alpha;
      cls.fit_residual = std::max(cls.fit_residual, fit.residual);
    }
  }
  return cls;
}

StructureSolution solve_structure_point(const SystemDef& sys, std::span<const double> point,
                                        StructureMode mode) {
  return solve_impl(sys, basis_at(sys, point), mode, false);
}

StructureSolution structure_jet(const SystemDef& sys, std::span<const double> point,
                                StructureMode mode) {
  return solve_impl(sys, basis_at(sys, point), mode, true);
}

InducedConnection build_connection(const SystemDef& sys, std::span<const double> point,
                                   StructureMode mode, InducedSign sign) {
  InducedConnection ic;
  ic.basis = basis_at(sys, point);
  ic.structure = solve_impl(sys, ic.basis, mode, true);
  ic.connection = induced_connection(ic.basis.levi_civita, ic.structure.T_field(), sign);
  return ic;
}

}  // namespace superint
