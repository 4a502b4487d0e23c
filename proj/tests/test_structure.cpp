#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "superint/builtins.hpp"
#include "superint/error.hpp"
#include "superint/structure.hpp"

using namespace superint;

namespace {

SystemDef euclidean_with_basis(const std::vector<std::string>& basis) {
  return make_system("euclid", {"x", "y", "z"}, {"1", "0", "0", "1", "0", "1"}, basis,
                     {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}});
}

// Same system with every basis potential multiplied by `factor`.
SystemDef scaled_basis(const SystemDef& sys, double factor) {
  SystemDef out = sys;
  for (auto& b : out.basis) b = validate(parse(std::to_string(factor) + "*(" + print(b) + ")"), sys.coords, {});
  return out;
}

double trace12(const DenseTensor& T, const DenseTensor& g_inv, std::size_t k) {
  double t = 0.0;
  for (std::size_t i = 0; i < T.dim(); ++i)
    for (std::size_t j = 0; j < T.dim(); ++j) t += g_inv(i, j) * T(i, j, k);
  return t;
}

}  // namespace

TEST(Classification, BuiltinSystems) {
  EXPECT_EQ(classify_degeneracy(builtin_system("sw:3"), sample_points(builtin_system("sw:3"), 20, 42)).kind,
            DegeneracyKind::NonDegenerate);
  const SystemDef sw4 = builtin_system("sw:4");
  const DegeneracyClass c4 = classify_degeneracy(sw4, sample_points(sw4, 20, 42));
  EXPECT_EQ(c4.kind, DegeneracyKind::NonDegenerate);
  EXPECT_EQ(c4.rank, 6);
  EXPECT_GE(c4.vote_fraction, 0.75);

  const SystemDef em1 = builtin_system("em1");
  const DegeneracyClass ce = classify_degeneracy(em1, sample_points(em1, 20, 42));
  EXPECT_EQ(ce.kind, DegeneracyKind::SemiDegenerate);
  EXPECT_EQ(ce.rank, 4);
  EXPECT_LT(ce.fit_residual, 1e-9);
  EXPECT_EQ(ce.mode(), StructureMode::SemiDegenerate);

  const SystemDef osc = builtin_system("osc-trivial");
  EXPECT_EQ(classify_degeneracy(osc, sample_points(osc, 20, 42)).kind, DegeneracyKind::NonDegenerate);
}

TEST(Classification, AffineBasisIsSemiDegenerate) {
  // Rows (V, dV, Lap V) of {1, x, y, z} span n+1 = 4 dimensions with
  // Lap V = 0, i.e. s = 0 and alpha = 0.
  const SystemDef sys = euclidean_with_basis({"1", "x", "y", "z"});
  const DegeneracyClass c = classify_degeneracy(sys, sample_points(sys, 12, 5));
  EXPECT_EQ(c.kind, DegeneracyKind::SemiDegenerate);
  EXPECT_EQ(c.rank, 4);
  for (std::size_t i = 0; i < c.s.size(); ++i) {
    for (double v : c.s[i]) EXPECT_NEAR(v, 0.0, 1e-12);
    EXPECT_NEAR(c.alpha[i], 0.0, 1e-12);
  }
}

TEST(Classification, DependentBasisIsHigherDegeneracy) {
  const SystemDef sys = euclidean_with_basis({"1", "x", "y", "x + y"});
  const DegeneracyClass c = classify_degeneracy(sys, sample_points(sys, 12, 5));
  EXPECT_EQ(c.kind, DegeneracyKind::HigherDegeneracy);
  EXPECT_EQ(c.rank, 3);
  EXPECT_THROW(c.mode(), ClassificationError);
  for (int r : c.per_point_ranks) EXPECT_EQ(r, 3);
}

TEST(Classification, TooFewPoints) {
  const SystemDef sw3 = builtin_system("sw:3");
  EXPECT_THROW(classify_degeneracy(sw3, sample_points(sw3, 7, 42)), ClassificationError);
}

TEST(Classification, RanksAreConsistentWithVote) {
  const SystemDef em1 = builtin_system("em1");
  const DegeneracyClass c = classify_degeneracy(em1, sample_points(em1, 16, 3));
  std::size_t agree = 0;
  for (int r : c.per_point_ranks) agree += r == c.rank;
  EXPECT_DOUBLE_EQ(c.vote_fraction, static_cast<double>(agree) / c.per_point_ranks.size());
}

TEST(Structure, OscTrivialVanishes) {
  const SystemDef osc = builtin_system("osc-trivial");
  const StructureSolution s = structure_jet(osc, std::vector<double>{1.0, 1.0, 1.0}, StructureMode::NonDegenerate);
  EXPECT_LT(s.T.max_abs(), 1e-12);
  EXPECT_LT(s.tau.max_abs(), 1e-12);
  EXPECT_LT(s.residual, 1e-12);
  ASSERT_TRUE(s.dT && s.dtau);
  EXPECT_LT(s.dT->max_abs(), 1e-12);
  EXPECT_LT(s.dtau->max_abs(), 1e-12);
}

TEST(Structure, SmorodinskiWinternitzIsProperAndTraceFree) {
  for (const char* name : {"sw:3", "sw:4", "sw:5"}) {
    SCOPED_TRACE(name);
    const SystemDef sys = builtin_system(name);
    for (const auto& p : sample_points(sys, 8, 11)) {
      const StructureSolution s = solve_structure_point(sys, p, StructureMode::NonDegenerate);
      EXPECT_LT(s.tau.max_abs() / (1.0 + s.T.max_abs()), 1e-9);
      const MetricPointData m = metric_at(sys, p);
      for (std::size_t k = 0; k < sys.n; ++k) EXPECT_LT(std::abs(trace12(s.T, m.g_inv, k)), 1e-9 * (1.0 + s.T.max_abs()));
      EXPECT_LT(s.residual, 1e-12);
    }
  }
}

TEST(Structure, SmorodinskiWinternitzClosedForm) {
  // Hand solution on flat R^n with tau = 0: inserting V = 1/x_k^2 gives
  // T_kk^k = -3(n-1)/(n x_k), T_ii^k = 3/(n x_k) for i != k, and T_ij^k = 0
  // for i != j; V = r^2 and V = 1 are then satisfied identically.
  for (const char* name : {"sw:3", "sw:4"}) {
    SCOPED_TRACE(name);
    const SystemDef sys = builtin_system(name);
    const std::size_t n = sys.n;
    const double nd = static_cast<double>(n);
    for (const auto& p : sample_points(sys, 4, 8)) {
      const StructureSolution s = solve_structure_point(sys, p, StructureMode::NonDegenerate);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            double expect = 0.0;
            if (i == j) expect = i == k ? -3.0 * (nd - 1.0) / (nd * p[k]) : 3.0 / (nd * p[k]);
            EXPECT_NEAR(s.T(i, j, k), expect, 1e-12 * (1.0 + std::abs(expect)));
          }
    }
  }
}

TEST(Structure, Em1SemiDegenerateFit) {
  const SystemDef em1 = builtin_system("em1");
  for (const auto& p : sample_points(em1, 10, 42)) {
    const BasisPointData d = basis_at(em1, p);
    const SemiFit fit = fit_semi_degeneracy(d);
    EXPECT_LT(fit.residual, 1e-9);
    const MetricPointData& m = d.metric;
    for (std::size_t a = 0; a < d.V.size(); ++a) {
      double rhs = fit.alpha * d.V[a].value();
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) rhs += m.g_inv(i, j) * fit.s[i] * d.V[a].grad(j);
      EXPECT_NEAR(d.hess[a].laplacian, rhs, 1e-9 * (1.0 + std::abs(d.hess[a].laplacian)));
    }
    const StructureSolution s = solve_structure_point(em1, p, StructureMode::SemiDegenerate);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s.tau(i, j), s.tau(j, i), 1e-12);
  }
}

TEST(Structure, ResidualInvariantUnderBasisScaling) {
  for (const char* name : {"sw:3", "em1"}) {
    SCOPED_TRACE(name);
    const SystemDef sys = builtin_system(name);
    const SystemDef big = scaled_basis(sys, 1e3);
    const StructureMode mode = std::string(name) == "em1" ? StructureMode::SemiDegenerate : StructureMode::NonDegenerate;
    for (const auto& p : sample_points(sys, 5, 9)) {
      const StructureSolution a = solve_structure_point(sys, p, mode);
      const StructureSolution b = solve_structure_point(big, p, mode);
      // Both residuals sit at rounding level; the bound allows for that level.
      EXPECT_LE(b.residual, 2.0 * a.residual + 1e-15);
      EXPECT_LT((a.T - b.T).max_abs(), 1e-10 * (1.0 + a.T.max_abs()));
      EXPECT_LT((a.tau - b.tau).max_abs(), 1e-10 * (1.0 + a.tau.max_abs()));
    }
  }
}

TEST(Structure, JetPartialsMatchFiniteDifferences) {
  const double h = 1e-5;
  for (const char* name : {"sw:3", "sw:4", "em1", "osc-trivial"}) {
    SCOPED_TRACE(name);
    const SystemDef sys = builtin_system(name);
    const StructureMode mode = std::string(name) == "em1" ? StructureMode::SemiDegenerate : StructureMode::NonDegenerate;
    const std::size_t n = sys.n;
    for (const auto& p : sample_points(sys, 5, 21)) {
      const StructureSolution s = structure_jet(sys, p, mode);
      ASSERT_TRUE(s.dT && s.dtau);
      for (std::size_t l = 0; l < n; ++l) {
        std::vector<double> pp = p, pm = p;
        pp[l] += h;
        pm[l] -= h;
        const StructureSolution sp = solve_structure_point(sys, pp, mode);
        const StructureSolution sm = solve_structure_point(sys, pm, mode);
        const DenseTensor fdT = (sp.T - sm.T) * (1.0 / (2 * h));
        const DenseTensor fdtau = (sp.tau - sm.tau) * (1.0 / (2 * h));
        double errT = 0.0, scaleT = 0.0, errtau = 0.0, scaletau = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
              errT = std::max(errT, std::abs((*s.dT)(l, i, j, k) - fdT(i, j, k)));
              scaleT = std::max(scaleT, std::abs(fdT(i, j, k)));
            }
            errtau = std::max(errtau, std::abs((*s.dtau)(l, i, j) - fdtau(i, j)));
            scaletau = std::max(scaletau, std::abs(fdtau(i, j)));
          }
        EXPECT_LE(errT, 1e-5 * (1.0 + scaleT)) << "l=" << l;
        EXPECT_LE(errtau, 1e-5 * (1.0 + scaletau)) << "l=" << l;
      }
    }
  }
}

TEST(Structure, InducedConnectionOnFlatMetricIsStructureTensor) {
  // Euclidean Christoffels vanish, so Gamma~^k_ij = sign * T_ij^k.
  for (const auto& [name, mode] : {std::pair{"sw:3", StructureMode::NonDegenerate},
                                   std::pair{"em1", StructureMode::SemiDegenerate}}) {
    SCOPED_TRACE(name);
    const SystemDef sys = builtin_system(name);
    const auto p = sample_points(sys, 1, 4).front();
    for (InducedSign sign : {InducedSign::Plus, InducedSign::Minus}) {
      const InducedConnection ic = build_connection(sys, p, mode, sign);
      const double sg = sign == InducedSign::Plus ? 1.0 : -1.0;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(ic.connection.gamma(k, i, j), sg * ic.structure.T(i, j, k), 1e-14);
            EXPECT_DOUBLE_EQ(ic.connection.gamma(k, i, j), ic.connection.gamma(k, j, i));
          }
    }
  }
}

TEST(Structure, OscTrivialConnectionIsZero) {
  const SystemDef osc = builtin_system("osc-trivial");
  const InducedConnection ic = build_connection(osc, std::vector<double>{0.3, -0.4, 0.5}, StructureMode::NonDegenerate);
  EXPECT_LT(ic.connection.gamma.max_abs(), 1e-12);
  EXPECT_LT(ic.connection.dgamma.max_abs(), 1e-12);
}

TEST(Structure, ScaledResidualFormula) {
  EXPECT_DOUBLE_EQ(scaled_residual(2.0, 1.0, 1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(scaled_residual(0.0, 5.0, 5.0, 5.0), 0.0);
}
