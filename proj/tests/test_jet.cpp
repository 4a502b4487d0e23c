#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "superint/error.hpp"
#include "superint/jet.hpp"
#include "support/oracle.hpp"

using namespace superint;

namespace {

constexpr std::size_t kDim = 3;

std::vector<Jet3> seeds(const std::vector<double>& x) {
  std::vector<Jet3> v;
  for (std::size_t i = 0; i < x.size(); ++i) v.push_back(Jet3::seed(i, x[i], x.size()));
  return v;
}

// Every component of `j` against finite differences of `f`.
void expect_matches_fd(const Jet3& j, const oracle::Scalar& f, const std::vector<double>& x, double rel) {
  const std::size_t n = x.size();
  EXPECT_TRUE(oracle::close(j.value(), f(x), 1e-14));
  for (std::size_t a = 0; a < n; ++a) {
    EXPECT_TRUE(oracle::close(j.grad(a), oracle::partial(f, x, {a}, oracle::step_for_order(1)), rel))
        << "d" << a;
    for (std::size_t b = a; b < n; ++b) {
      EXPECT_TRUE(oracle::close(j.hess(a, b), oracle::partial(f, x, {a, b}, oracle::step_for_order(2)), rel))
          << "d" << a << b;
      for (std::size_t c = b; c < n; ++c) {
        EXPECT_TRUE(
            oracle::close(j.third(a, b, c), oracle::partial(f, x, {a, b, c}, oracle::step_for_order(3)), rel))
            << "d" << a << b << c;
      }
    }
  }
}

}  // namespace

TEST(Jet, SeedAndConstant) {
  const Jet3 c = Jet3::constant(2.5, kDim);
  EXPECT_EQ(c.value(), 2.5);
  for (std::size_t i = 0; i < kDim; ++i) EXPECT_EQ(c.grad(i), 0.0);
  const Jet3 y = Jet3::seed(1, 0.7, kDim);
  EXPECT_EQ(y.value(), 0.7);
  EXPECT_EQ(y.grad(0), 0.0);
  EXPECT_EQ(y.grad(1), 1.0);
  EXPECT_EQ(y.hess(1, 1), 0.0);
}

TEST(Jet, PackedSymmetricStorage) {
  Jet3 j(kDim);
  j.set_hess(0, 2, 3.0);
  EXPECT_EQ(j.hess(2, 0), 3.0);
  j.set_third(2, 0, 1, 5.0);
  EXPECT_EQ(j.third(0, 1, 2), 5.0);
  EXPECT_EQ(j.third(1, 2, 0), 5.0);
  EXPECT_EQ(j.hess_data().size(), Jet3::hess_size(kDim));
  EXPECT_EQ(j.third_data().size(), Jet3::third_size(kDim));
}

TEST(Jet, ProductOfCoordinates) {
  // x*y*z has a single nonzero third derivative.
  const auto s = seeds({0.3, -1.2, 2.0});
  const Jet3 p = s[0] * s[1] * s[2];
  EXPECT_DOUBLE_EQ(p.value(), 0.3 * -1.2 * 2.0);
  EXPECT_DOUBLE_EQ(p.hess(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(p.third(0, 1, 2), 1.0);
  EXPECT_EQ(p.third(0, 0, 1), 0.0);
  EXPECT_EQ(p.hess(0, 0), 0.0);
}

TEST(Jet, ArithmeticAgainstFiniteDifferences) {
  const std::vector<double> x{0.7, 1.3, 0.9};
  const auto s = seeds(x);
  const Jet3 j = (s[0] * s[0] * s[1] - 3.0 * s[2]) / (s[0] + s[1] * s[2]);
  auto f = [](const std::vector<double>& p) { return (p[0] * p[0] * p[1] - 3.0 * p[2]) / (p[0] + p[1] * p[2]); };
  expect_matches_fd(j, f, x, 1e-5);
}

TEST(Jet, PrimitivesAgainstFiniteDifferences) {
  const std::vector<double> x{0.6, 0.8, 1.1};
  const auto s = seeds(x);
  const Jet3 r2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];

  struct Case {
    const char* name;
    Jet3 jet;
    oracle::Scalar f;
  };
  auto r2f = [](const std::vector<double>& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; };
  const std::vector<Case> cases{
      {"sqrt", sqrt(r2), [&](const auto& p) { return std::sqrt(r2f(p)); }},
      {"recip", recip(r2), [&](const auto& p) { return 1.0 / r2f(p); }},
      {"pow-2", pow(s[0], -2), [](const auto& p) { return 1.0 / (p[0] * p[0]); }},
      {"pow5", pow(s[1] + s[2], 5), [](const auto& p) { return std::pow(p[1] + p[2], 5); }},
      {"exp", exp(s[0] * s[1]), [](const auto& p) { return std::exp(p[0] * p[1]); }},
      {"log", log(r2), [&](const auto& p) { return std::log(r2f(p)); }},
      {"sin", sin(s[0] * s[2]), [](const auto& p) { return std::sin(p[0] * p[2]); }},
      {"cos", cos(s[1] - s[0]), [](const auto& p) { return std::cos(p[1] - p[0]); }},
  };
  for (const auto& c : cases) {
    SCOPED_TRACE(c.name);
    expect_matches_fd(c.jet, c.f, x, 1e-5);
  }
}

TEST(Jet, DirectionalDerivatives) {
  const std::vector<double> x{0.4, 0.5, 0.6};
  const auto s = seeds(x);
  const Jet3 j = exp(s[0]) * s[1] * s[1] + s[2];
  const std::vector<double> v{0.3, -0.5, 1.0};
  auto along = [&](double t) {
    return std::exp(x[0] + t * v[0]) * (x[1] + t * v[1]) * (x[1] + t * v[1]) + x[2] + t * v[2];
  };
  auto g = [&](const std::vector<double>& p) { return along(p[0]); };
  for (int order = 1; order <= 3; ++order) {
    const std::vector<std::size_t> idx(static_cast<std::size_t>(order), 0);
    const double fd = oracle::partial(g, {0.0}, idx, oracle::step_for_order(static_cast<std::size_t>(order)));
    EXPECT_TRUE(oracle::close(j.directional(v, order), fd, 1e-5)) << "order " << order;
  }
}

TEST(Jet, ComposeMatchesBuiltinPrimitive) {
  const auto s = seeds({0.5, 0.2, 0.9});
  const Jet3 a = s[0] * s[1] + s[2];
  const double a0 = a.value();
  const Jet3 viaCompose = compose(a, std::exp(a0), std::exp(a0), std::exp(a0), std::exp(a0));
  const Jet3 direct = exp(a);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j)
      for (std::size_t k = j; k < 3; ++k) EXPECT_NEAR(viaCompose.third(i, j, k), direct.third(i, j, k), 1e-13);
}

TEST(Jet, DomainErrors) {
  const Jet3 zero = Jet3::constant(0.0, kDim);
  const Jet3 neg = Jet3::constant(-1.0, kDim);
  EXPECT_THROW(recip(zero), DomainError);
  EXPECT_THROW(sqrt(neg), DomainError);
  EXPECT_THROW(sqrt(zero), DomainError);
  EXPECT_THROW(log(zero), DomainError);
  EXPECT_THROW(pow(zero, -1), DomainError);
  EXPECT_THROW(zero / zero, DomainError);
}

TEST(Jet, DimensionMismatchThrows) {
  EXPECT_THROW(Jet3::seed(0, 1.0, 3) + Jet3::seed(0, 1.0, 4), Error);
}

TEST(Jet, LeibnizProperty) {
  // (fg)' = f'g + fg' holds exactly component by component at order 1.
  const auto s = seeds({1.1, 0.4, 0.7});
  const Jet3 f = sin(s[0] * s[1]);
  const Jet3 g = exp(s[2]) + s[0];
  const Jet3 fg = f * g;
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(fg.grad(i), f.grad(i) * g.value() + f.value() * g.grad(i), 1e-14);
}
