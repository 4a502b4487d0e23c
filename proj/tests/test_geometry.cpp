#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "superint/builtins.hpp"
#include "superint/error.hpp"
#include "superint/geometry.hpp"
#include "support/oracle.hpp"

using namespace superint;

namespace {

constexpr Variance L = Variance::Lower;

SystemDef conformally_flat(const std::string& factor) {
  return make_system("cf", {"x", "y", "z"}, {factor, "0", "0", factor, "0", factor}, {},
                     {{-0.6, 0.6}, {-0.6, 0.6}, {-0.6, 0.6}});
}

SystemDef warped() {
  return make_system("warped", {"x", "y", "z"}, {"1", "0", "0", "x^2", "0", "x^2"}, {},
                     {{0.5, 2.0}, {-1.0, 1.0}, {-1.0, 1.0}});
}

CurvatureBundle lc_curvature(const SystemDef& sys, const std::vector<double>& p) {
  const MetricPointData m = metric_at(sys, p);
  return contractions(curvature(christoffel(m)), m);
}

}  // namespace

TEST(Geometry, EuclideanIsFlat) {
  const SystemDef e = conformally_flat("1");
  const std::vector<double> p{0.1, -0.2, 0.3};
  const MetricPointData m = metric_at(e, p);
  EXPECT_EQ(m.g, DenseTensor::identity(3, L, L));
  EXPECT_EQ(m.dg.max_abs(), 0.0);
  const ConnectionPointData c = christoffel(m);
  EXPECT_EQ(c.gamma.max_abs(), 0.0);
  EXPECT_EQ(c.dgamma.max_abs(), 0.0);
  EXPECT_EQ(curvature(c).max_abs(), 0.0);
}

TEST(Geometry, ChristoffelOfWarpedMetric) {
  // dx^2 + x^2 (dy^2 + dz^2): G^x_yy = G^x_zz = -x, G^y_xy = G^z_xz = 1/x.
  const SystemDef sys = warped();
  const std::vector<double> p{1.3, 0.2, -0.4};
  const ConnectionPointData c = christoffel(metric_at(sys, p));
  const double x = p[0];
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double expect = 0.0;
        if (k == 0 && i == j && i > 0) expect = -x;
        if (k > 0 && ((i == 0 && j == k) || (j == 0 && i == k))) expect = 1.0 / x;
        EXPECT_NEAR(c.gamma(k, i, j), expect, 1e-14) << k << i << j;
      }
  // d_x G^x_yy = -1, d_x G^y_xy = -1/x^2.
  EXPECT_NEAR(c.dgamma(0, 0, 1, 1), -1.0, 1e-14);
  EXPECT_NEAR(c.dgamma(0, 1, 0, 1), -1.0 / (x * x), 1e-14);
}

TEST(Geometry, WarpedSectionalCurvature) {
  // The fibre plane has sectional curvature -1/x^2, radial planes are flat:
  // Ric_xx = 0, Ric_yy = Ric_zz = -1.
  const SystemDef sys = warped();
  const CurvatureBundle cb = lc_curvature(sys, {0.8, 0.1, 0.1});
  EXPECT_NEAR(cb.Ric(0, 0), 0.0, 1e-13);
  EXPECT_NEAR(cb.Ric(1, 1), -1.0, 1e-13);
  EXPECT_NEAR(cb.Ric(2, 2), -1.0, 1e-13);
  EXPECT_NEAR(cb.scal, -2.0 / (0.8 * 0.8), 1e-12);
}

TEST(Geometry, RoundSphereHasRicciTwoG) {
  const SystemDef sphere = builtin_system("sphere3");
  for (const auto& p : sample_points(sphere, 10, 7)) {
    const MetricPointData m = metric_at(sphere, p);
    const CurvatureBundle cb = contractions(curvature(christoffel(m)), m);
    EXPECT_LT((cb.Ric - 2.0 * m.g).max_abs(), 1e-12 * m.g.max_abs());
    EXPECT_NEAR(cb.scal, 6.0, 1e-12);
    // Constant curvature: Riem_aijk = g_aj g_ik - g_ak g_ij, and Proj = 0.
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          for (std::size_t k = 0; k < 3; ++k)
            EXPECT_NEAR(cb.Riem(a, i, j, k), m.g(a, j) * m.g(i, k) - m.g(a, k) * m.g(i, j), 1e-11);
    EXPECT_LT(cb.Proj.max_abs(), 1e-11);
  }
}

TEST(Geometry, HyperbolicBallHasRicciMinusTwoG) {
  const SystemDef ball = conformally_flat("4/(1 - x^2 - y^2 - z^2)^2");
  const std::vector<double> p{0.2, -0.3, 0.4};
  const MetricPointData m = metric_at(ball, p);
  const CurvatureBundle cb = lc_curvature(ball, p);
  EXPECT_LT((cb.Ric + 2.0 * m.g).max_abs(), 1e-11);
  EXPECT_NEAR(cb.scal, -6.0, 1e-11);
}

TEST(Geometry, CurvatureSymmetries) {
  const SystemDef sys = make_system("generic", {"x", "y", "z"},
                                    {"2 + x^2", "x*y/3", "0", "1 + z^2", "y/5", "3 + x*z"}, {},
                                    {{0.1, 0.9}, {0.1, 0.9}, {0.1, 0.9}});
  for (const auto& p : sample_points(sys, 6, 3)) {
    const MetricPointData m = metric_at(sys, p);
    const DenseTensor R = curvature(christoffel(m));
    const CurvatureBundle cb = contractions(R, m);
    const double s = 1.0 + R.max_abs();
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(R(b, i, j, k), -R(b, i, k, j), 1e-13 * s);
            EXPECT_NEAR(R(b, i, j, k) + R(b, j, k, i) + R(b, k, i, j), 0.0, 1e-13 * s);
            // Levi-Civita: Riem is antisymmetric in its first pair and pair-symmetric.
            EXPECT_NEAR(cb.Riem(b, i, j, k), -cb.Riem(i, b, j, k), 1e-12 * s);
            EXPECT_NEAR(cb.Riem(b, i, j, k), cb.Riem(j, k, b, i), 1e-12 * s);
          }
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(cb.Ric(i, j), cb.Ric(j, i), 1e-12 * s);
    EXPECT_NEAR(cb.scal, -cb.trB, 1e-12 * s);
  }
}

TEST(Geometry, MetricPartialsMatchFiniteDifferences) {
  const SystemDef sys = conformally_flat("4/(1 + x^2 + y^2 + z^2)^2");
  const std::vector<double> p{0.3, -0.2, 0.5};
  const MetricPointData m = metric_at(sys, p);
  auto gii = [&](const std::vector<double>& q) { return metric_at(sys, q).g(0, 0); };
  auto ginv = [&](const std::vector<double>& q) { return metric_at(sys, q).g_inv(1, 1); };
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_TRUE(oracle::close(m.dg(k, 0, 0), oracle::partial(gii, p, {k}, 1e-5), 1e-7));
    EXPECT_TRUE(oracle::close(m.dg_inv(k, 1, 1), oracle::partial(ginv, p, {k}, 1e-5), 1e-7));
    for (std::size_t l = 0; l < 3; ++l)
      EXPECT_TRUE(oracle::close(m.d2g(k, l, 0, 0), oracle::partial(gii, p, {k, l}, 1e-4), 1e-5));
  }
}

TEST(Geometry, ConnectionPartialsMatchFiniteDifferences) {
  const SystemDef sys = builtin_system("sphere3");
  const std::vector<double> p{0.3, -0.2, 0.5};
  const ConnectionPointData c = christoffel(metric_at(sys, p));
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          auto f = [&](const std::vector<double>& q) { return christoffel(metric_at(sys, q)).gamma(k, i, j); };
          EXPECT_TRUE(oracle::close(c.dgamma(l, k, i, j), oracle::partial(f, p, {l}, 1e-5), 1e-7));
        }
}

TEST(Geometry, HessianOfQuadraticOnEuclidean) {
  const SystemDef e = conformally_flat("1");
  const Expr r2 = validate(parse("x^2 + y^2 + z^2"), e.coords, {});
  const std::vector<double> p{0.1, 0.2, 0.3};
  const MetricPointData m = metric_at(e, p);
  const CovariantHessian h = covariant_hessian(eval_jet(r2, p), christoffel(m), m);
  EXPECT_LT((h.hessian - 2.0 * DenseTensor::identity(3, L, L)).max_abs(), 1e-15);
  EXPECT_DOUBLE_EQ(h.laplacian, 6.0);
}

TEST(Geometry, LaplacianGradientMatchesFiniteDifferences) {
  const SystemDef sys = builtin_system("sphere3");
  const Expr V = validate(parse("x*y + z^3 + exp(x)"), sys.coords, {});
  const std::vector<double> p{0.2, 0.4, -0.3};
  const MetricPointData m = metric_at(sys, p);
  const auto grad = laplacian_gradient(eval_jet(V, p), christoffel(m), m);
  auto lap = [&](const std::vector<double>& q) {
    const MetricPointData mq = metric_at(sys, q);
    return covariant_hessian(eval_jet(V, q), christoffel(mq), mq).laplacian;
  };
  for (std::size_t k = 0; k < 3; ++k) EXPECT_TRUE(oracle::close(grad[k], oracle::partial(lap, p, {k}, 1e-5), 1e-7));
}

TEST(Geometry, MetricIsParallelForLeviCivita) {
  const SystemDef sys = builtin_system("sphere3");
  const std::vector<double> p{0.5, 0.1, -0.2};
  const MetricPointData m = metric_at(sys, p);
  EXPECT_LT(covariant_d(metric_field(m), christoffel(m)).max_abs(), 1e-13);
}

TEST(Geometry, ExteriorDerivativeOfExactFormVanishes) {
  const SystemDef e = conformally_flat("1");
  const Expr f = validate(parse("sin(x*y) + z^2*x"), e.coords, {});
  const Jet3 j = eval_jet(f, std::vector<double>{0.3, 0.7, -0.4});
  TensorField df{DenseTensor(3, {L}), DenseTensor(3, {L, L})};
  for (std::size_t i = 0; i < 3; ++i) {
    df.value(i) = j.grad(i);
    for (std::size_t l = 0; l < 3; ++l) df.partials(l, i) = j.hess(l, i);
  }
  EXPECT_EQ(exterior_d(df).max_abs(), 0.0);
}

TEST(Geometry, InducedConnectionRejectsAsymmetricStructureTensor) {
  const SystemDef e = conformally_flat("1");
  const ConnectionPointData lc = christoffel(metric_at(e, std::vector<double>{0.1, 0.1, 0.1}));
  TensorField S{DenseTensor(3, {L, L, Variance::Upper}), DenseTensor(3, {L, L, L, Variance::Upper})};
  S.value(0, 1, 2) = 1.0;
  EXPECT_THROW(induced_connection(lc, S, InducedSign::Plus), NumericError);
  S.value(1, 0, 2) = 1.0;
  const ConnectionPointData plus = induced_connection(lc, S, InducedSign::Plus);
  const ConnectionPointData minus = induced_connection(lc, S, InducedSign::Minus);
  EXPECT_DOUBLE_EQ(plus.gamma(2, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(minus.gamma(2, 0, 1), -1.0);
}

TEST(Geometry, SingularMetricRejected) {
  const SystemDef sys = make_system("deg", {"x", "y", "z"}, {"x", "0", "0", "1", "0", "1"}, {},
                                    {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}});
  EXPECT_THROW(metric_at(sys, std::vector<double>{0.0, 0.2, 0.2}), NumericError);
}
