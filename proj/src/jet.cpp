#include "superint/jet.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "superint/error.hpp"

namespace superint {

namespace {

void sort3(std::size_t& i, std::size_t& j, std::size_t& k) {
  if (i > j) std::swap(i, j);
  if (j > k) std::swap(j, k);
  if (i > j) std::swap(i, j);
}

// x^e with the convention that a zero coefficient kills the term, so that
// 0^(negative) never leaks a NaN into polynomial derivatives.
double coeff_pow(double coeff, double x, int e) {
  if (coeff == 0.0) return 0.0;
  return coeff * std::pow(x, e);
}

[[noreturn]] void domain_fail(Primitive p, double v) {
  std::ostringstream os;
  os.precision(17);
  os << "domain error: " << primitive_name(p) << " at value " << v;
  throw DomainError(os.str());
}

}  // namespace

Jet3::Jet3(std::size_t dim)
    : dim_(dim), grad_(dim, 0.0), hess_(hess_size(dim), 0.0), third_(third_size(dim), 0.0) {}

Jet3 Jet3::constant(double value, std::size_t dim) {
  Jet3 j(dim);
  j.value_ = value;
  return j;
}

Jet3 Jet3::seed(std::size_t index, double x0, std::size_t dim) {
  if (index >= dim) {
    throw NumericError("Jet3::seed: coordinate index " + std::to_string(index) +
                            " out of range for dimension " + std::to_string(dim));
  }
  Jet3 j(dim);
  j.value_ = x0;
  j.grad_[index] = 1.0;
  return j;
}

std::size_t Jet3::hess_index(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

std::size_t Jet3::third_index(std::size_t i, std::size_t j, std::size_t k) {
  sort3(i, j, k);
  return k * (k + 1) * (k + 2) / 6 + j * (j + 1) / 2 + i;
}

void Jet3::require_same_dim(const Jet3& other) const {
  if (dim_ != other.dim_) {
    throw NumericError("Jet3: dimension mismatch (" + std::to_string(dim_) + " vs " +
                                std::to_string(other.dim_) + ")");
  }
}

double Jet3::directional(std::span<const double> d, int order) const {
  double acc = 0.0;
  switch (order) {
    case 1:
      for (std::size_t i = 0; i < dim_; ++i) acc += grad_[i] * d[i];
      return acc;
    case 2:
      for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) acc += hess(i, j) * d[i] * d[j];
      return acc;
    case 3:
      for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
          for (std::size_t k = 0; k < dim_; ++k) acc += third(i, j, k) * d[i] * d[j] * d[k];
      return acc;
    default:
      throw NumericError("Jet3::directional: order must be 1, 2 or 3");
  }
}

Jet3 Jet3::operator-() const {
  Jet3 r = *this;
  r *= -1.0;
  return r;
}

Jet3& Jet3::operator+=(const Jet3& rhs) {
  require_same_dim(rhs);
  value_ += rhs.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += rhs.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] += rhs.hess_[i];
  for (std::size_t i = 0; i < third_.size(); ++i) third_[i] += rhs.third_[i];
  return *this;
}

Jet3& Jet3::operator-=(const Jet3& rhs) {
  require_same_dim(rhs);
  value_ -= rhs.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] -= rhs.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] -= rhs.hess_[i];
  for (std::size_t i = 0; i < third_.size(); ++i) third_[i] -= rhs.third_[i];
  return *this;
}

Jet3& Jet3::operator*=(double s) {
  value_ *= s;
  for (double& v : grad_) v *= s;
  for (double& v : hess_) v *= s;
  for (double& v : third_) v *= s;
  return *this;
}

Jet3 operator*(const Jet3& a, const Jet3& b) {
  a.require_same_dim(b);
  const std::size_t n = a.dim_;
  Jet3 r(n);
  const double f = a.value_;
  const double g = b.value_;
  r.value_ = f * g;
  for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.grad_[i] * g + f * b.grad_[i];
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      r.hess_[Jet3::hess_index(i, j)] = a.hess(i, j) * g + a.grad_[i] * b.grad_[j] +
                                         a.grad_[j] * b.grad_[i] + f * b.hess(i, j);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      for (std::size_t i = 0; i <= j; ++i) {
        r.third_[Jet3::third_index(i, j, k)] =
            a.third(i, j, k) * g + a.hess(i, j) * b.grad_[k] + a.hess(i, k) * b.grad_[j] +
            a.hess(j, k) * b.grad_[i] + a.grad_[i] * b.hess(j, k) + a.grad_[j] * b.hess(i, k) +
            a.grad_[k] * b.hess(i, j) + f * b.third(i, j, k);
      }
    }
  }
  return r;
}

Jet3 operator/(const Jet3& a, const Jet3& b) {
  a.require_same_dim(b);
  if (b.value_ == 0.0) throw DomainError("domain error: division by a jet with zero value");
  return a * recip(b);
}

Jet3 compose(const Jet3& a, double h0, double h1, double h2, double h3) {
  const std::size_t n = a.dim();
  Jet3 r(n);
  r.set_value(h0);
  for (std::size_t i = 0; i < n; ++i) r.set_grad(i, h1 * a.grad(i));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      r.set_hess(i, j, h2 * a.grad(i) * a.grad(j) + h1 * a.hess(i, j));
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      for (std::size_t i = 0; i <= j; ++i) {
        const double t = h3 * a.grad(i) * a.grad(j) * a.grad(k) +
                         h2 * (a.hess(i, j) * a.grad(k) + a.hess(i, k) * a.grad(j) +
                               a.hess(j, k) * a.grad(i)) +
                         h1 * a.third(i, j, k);
        r.set_third(i, j, k, t);
      }
    }
  }
  return r;
}

std::string_view primitive_name(Primitive p) {
  switch (p) {
    case Primitive::Recip: return "recip";
    case Primitive::Sqrt: return "sqrt";
    case Primitive::PowInt: return "pow";
    case Primitive::Exp: return "exp";
    case Primitive::Log: return "log";
    case Primitive::Sin: return "sin";
    case Primitive::Cos: return "cos";
  }
  return "?";
}

Jet3 apply(Primitive p, const Jet3& a, int exponent) {
  const double x = a.value();
  switch (p) {
    case Primitive::Recip: {
      if (x == 0.0) domain_fail(p, x);
      const double r = 1.0 / x;
      return compose(a, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
    }
    case Primitive::Sqrt: {
      if (!(x > 0.0)) domain_fail(p, x);
      const double s = std::sqrt(x);
      return compose(a, s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x));
    }
    case Primitive::PowInt: {
      const int k = exponent;
      if (k < 0 && x == 0.0) domain_fail(p, x);
      if (k == 0) return Jet3::constant(1.0, a.dim());
      const double dk = k;
      return compose(a, std::pow(x, k), coeff_pow(dk, x, k - 1),
                     coeff_pow(dk * (dk - 1.0), x, k - 2),
                     coeff_pow(dk * (dk - 1.0) * (dk - 2.0), x, k - 3));
    }
    case Primitive::Exp: {
      const double e = std::exp(x);
      return compose(a, e, e, e, e);
    }
    case Primitive::Log: {
      if (!(x > 0.0)) domain_fail(p, x);
      const double r = 1.0 / x;
      return compose(a, std::log(x), r, -r * r, 2.0 * r * r * r);
    }
    case Primitive::Sin: {
      const double s = std::sin(x), c = std::cos(x);
      return compose(a, s, c, -s, -c);
    }
    case Primitive::Cos: {
      const double s = std::sin(x), c = std::cos(x);
      return compose(a, c, -s, -c, s);
    }
  }
  throw NumericError("apply: unknown primitive");
}

Jet3 recip(const Jet3& a) { return apply(Primitive::Recip, a); }
Jet3 sqrt(const Jet3& a) { return apply(Primitive::Sqrt, a); }
Jet3 pow(const Jet3& a, int exponent) { return apply(Primitive::PowInt, a, exponent); }
Jet3 exp(const Jet3& a) { return apply(Primitive::Exp, a); }
Jet3 log(const Jet3& a) { return apply(Primitive::Log, a); }
Jet3 sin(const Jet3& a) { return apply(Primitive::Sin, a); }
Jet3 cos(const Jet3& a) { return apply(Primitive::Cos, a); }

}  // namespace superint
