#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "superint/error.hpp"
#include "superint/tensor.hpp"

using namespace superint;

namespace {

constexpr Variance U = Variance::Upper;
constexpr Variance L = Variance::Lower;

DenseTensor filled(std::size_t n, std::vector<Variance> var, double start) {
  DenseTensor t(n, std::move(var));
  double v = start;
  for (double& c : t.data()) {
    c = v;
    v = std::fmod(v * 1.37 + 0.61, 5.0) - 2.0;
  }
  return t;
}

DenseTensor sample_metric() {
  DenseTensor g(3, {L, L});
  const double m[3][3] = {{2.0, 0.3, -0.1}, {0.3, 1.5, 0.2}, {-0.1, 0.2, 1.0}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) g(i, j) = m[i][j];
  return g;
}

}  // namespace

TEST(Tensor, RowMajorLayout) {
  DenseTensor t(3, {L, L, U});
  t(1, 2, 0) = 7.0;
  EXPECT_EQ(t.data()[(1 * 3 + 2) * 3 + 0], 7.0);
  const auto idx = t.unflatten((1 * 3 + 2) * 3 + 0);
  EXPECT_EQ(idx[0], 1u);
  EXPECT_EQ(idx[1], 2u);
  EXPECT_EQ(idx[2], 0u);
}

TEST(Tensor, BadIndexAndShape) {
  DenseTensor t(3, {L, L});
  EXPECT_THROW(t(3, 0), NumericError);
  EXPECT_THROW(t(0, 0, 0), NumericError);
  EXPECT_THROW(DenseTensor(3, {L, L, L, L, L}), NumericError);
  EXPECT_THROW(t + DenseTensor(3, {L, U}), NumericError);
  EXPECT_THROW(t + DenseTensor(4, {L, L}), NumericError);
}

TEST(Tensor, SymmetrizeIsIdempotentProjection) {
  const DenseTensor t = filled(3, {L, L, L}, 0.4);
  const std::size_t slots[] = {0, 1, 2};
  const DenseTensor s = symmetrize(t, slots);
  EXPECT_LT((symmetrize(s, slots) - s).max_abs(), 1e-15);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(s(i, j, k), s(j, i, k), 1e-15);
        EXPECT_NEAR(s(i, j, k), s(k, j, i), 1e-15);
      }
  const DenseTensor a = antisymmetrize(t, slots);
  EXPECT_LT(symmetrize(a, slots).max_abs(), 1e-15);
}

TEST(Tensor, SymmetrizeRejectsMixedVariance) {
  const DenseTensor t = filled(3, {L, U}, 0.1);
  const std::size_t slots[] = {0, 1};
  EXPECT_THROW(symmetrize(t, slots), NumericError);
}

TEST(Tensor, ContractionIsTrace) {
  const DenseTensor t = filled(3, {U, L}, 1.0);
  const DenseTensor tr = contract(t, 0, 1);
  EXPECT_EQ(tr.rank(), 0u);
  EXPECT_DOUBLE_EQ(tr.data()[0], t(0, 0) + t(1, 1) + t(2, 2));
  EXPECT_THROW(contract(filled(3, {L, L}, 1.0), 0, 1), NumericError);
}

TEST(Tensor, ContractionOfRank3) {
  const DenseTensor t = filled(3, {L, L, U}, 0.2);
  const DenseTensor c = contract(t, 2, 1);
  ASSERT_EQ(c.rank(), 1u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(c(i), t(i, 0, 0) + t(i, 1, 1) + t(i, 2, 2));
}

TEST(Tensor, RaiseThenLowerIsIdentity) {
  const DenseTensor g = sample_metric();
  const MetricInverse inv = invert_metric(g);
  const DenseTensor t = filled(3, {L, L, L}, 0.9);
  const DenseTensor up = raise_index(t, 1, inv.inverse);
  EXPECT_EQ(up.variance()[1], U);
  const DenseTensor back = lower_index(up, 1, g);
  EXPECT_LT((back - t).max_abs(), 1e-13);
}

TEST(Tensor, InverseAndCondition) {
  const DenseTensor g = sample_metric();
  const MetricInverse inv = invert_metric(g);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double v = 0.0;
      for (std::size_t a = 0; a < 3; ++a) v += g(i, a) * inv.inverse(a, j);
      EXPECT_NEAR(v, i == j ? 1.0 : 0.0, 1e-14);
    }
  EXPECT_GT(inv.condition, 1.0);

  DenseTensor singular(3, {L, L});
  singular(0, 0) = 1.0;
  singular(1, 1) = 1.0;
  EXPECT_THROW(invert_metric(singular), NumericError);
}

TEST(Tensor, PermuteAndOuter) {
  const DenseTensor t = filled(3, {L, U, L}, 0.3);
  const std::size_t perm[] = {2, 0, 1};
  const DenseTensor p = permute(t, perm);
  EXPECT_EQ(p.variance()[0], L);
  EXPECT_EQ(p.variance()[1], L);
  EXPECT_EQ(p.variance()[2], U);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(p(i, j, k), t(j, k, i));

  const DenseTensor a = filled(3, {U}, 1.0);
  const DenseTensor b = filled(3, {L}, -0.5);
  const DenseTensor ab = outer(a, b);
  EXPECT_EQ(ab.rank(), 2u);
  EXPECT_DOUBLE_EQ(ab(2, 1), a(2) * b(1));
}

TEST(Tensor, IdentityContractsToDimension) {
  const DenseTensor id = DenseTensor::identity(4, U, L);
  EXPECT_DOUBLE_EQ(contract(id, 0, 1).data()[0], 4.0);
}
