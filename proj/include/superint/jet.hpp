#pragma once

// Truncated multivariate Taylor arithmetic to third order.
//
// A Jet3 carries the value of a scalar function at a point together with all
// of its partial derivatives up to order three. Second and third derivatives
// are stored packed over the upper simplex (i <= j <= k), so symmetry holds by
// construction. Arithmetic follows the truncated Leibniz rule; univariate
// primitives compose through Faa di Bruno to order three.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace superint {

class Jet3 {
 public:
  Jet3() = default;
  explicit Jet3(std::size_t dim);

  static Jet3 constant(double value, std::size_t dim);
  /// Independent coordinate direction `index` seeded at `x0`.
  static Jet3 seed(std::size_t index, double x0, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  double value() const noexcept { return value_; }
  double grad(std::size_t i) const { return grad_[i]; }
  double hess(std::size_t i, std::size_t j) const { return hess_[hess_index(i, j)]; }
  double third(std::size_t i, std::size_t j, std::size_t k) const {
    return third_[third_index(i, j, k)];
  }

  void set_value(double v) noexcept { value_ = v; }
  void set_grad(std::size_t i, double v) { grad_[i] = v; }
  void set_hess(std::size_t i, std::size_t j, double v) { hess_[hess_index(i, j)] = v; }
  void set_third(std::size_t i, std::size_t j, std::size_t k, double v) {
    third_[third_index(i, j, k)] = v;
  }

  std::span<const double> grad_data() const noexcept { return grad_; }
  std::span<const double> hess_data() const noexcept { return hess_; }
  std::span<const double> third_data() const noexcept { return third_; }

  /// Directional derivatives of order 1..3 along `direction`.
  double directional(std::span<const double> direction, int order) const;

  Jet3 operator-() const;
  Jet3& operator+=(const Jet3& rhs);
  Jet3& operator-=(const Jet3& rhs);
  Jet3& operator*=(double s);

  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  friend Jet3 operator*(const Jet3& a, const Jet3& b);
  friend Jet3 operator/(const Jet3& a, const Jet3& b);
  friend Jet3 operator*(Jet3 a, double s) { return a *= s; }
  friend Jet3 operator*(double s, Jet3 a) { return a *= s; }

  friend bool operator==(const Jet3&, const Jet3&) = default;

  static std::size_t hess_size(std::size_t n) { return n * (n + 1) / 2; }
  static std::size_t third_size(std::size_t n) { return n * (n + 1) * (n + 2) / 6; }
  static std::size_t hess_index(std::size_t i, std::size_t j);
  static std::size_t third_index(std::size_t i, std::size_t j, std::size_t k);

 private:
  void require_same_dim(const Jet3& other) const;

  std::size_t dim_ = 0;
  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
  std::vector<double> third_;
};

enum class Primitive { Recip, Sqrt, PowInt, Exp, Log, Sin, Cos };

std::string_view primitive_name(Primitive p);

/// Composition h(a) for a univariate primitive h. `exponent` is only read for
/// Primitive::PowInt. Throws DomainError when a.value() is outside the domain
/// of h.
Jet3 apply(Primitive p, const Jet3& a, int exponent = 0);

Jet3 recip(const Jet3& a);
Jet3 sqrt(const Jet3& a);
Jet3 pow(const Jet3& a, int exponent);
Jet3 exp(const Jet3& a);
Jet3 log(const Jet3& a);
Jet3 sin(const Jet3& a);
Jet3 cos(const Jet3& a);

/// Apply a univariate function given its derivatives h, h', h'', h''' at
/// a.value().
Jet3 compose(const Jet3& a, double h0, double h1, double h2, double h3);

}  // namespace superint
