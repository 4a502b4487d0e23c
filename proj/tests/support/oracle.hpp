#pragma once

// Independent oracles: central finite differences built from plain values
// only, never from jets.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Scalar = std::function<double(const std::vector<double>&)>;

/// Product stencil: for indices (i_1..i_r),
///   sum over s in {-1,1}^r of (prod s) f(x + h sum s_a e_{i_a}) / (2h)^r,
/// a second-order accurate approximation of d_{i_1}..d_{i_r} f.
inline double central(const Scalar& f, const std::vector<double>& x, const std::vector<std::size_t>& idx,
                      double h) {
  const std::size_t r = idx.size();
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << r); ++mask) {
    std::vector<double> y = x;
    double sign = 1.0;
    for (std::size_t a = 0; a < r; ++a) {
      const double s = (mask >> a) & 1u ? -1.0 : 1.0;
      sign *= s;
      y[idx[a]] += s * h;
    }
    sum += sign * f(y);
  }
  return sum / std::pow(2.0 * h, static_cast<double>(r));
}

/// One Richardson step on top of the product stencil: fourth-order accurate.
inline double partial(const Scalar& f, const std::vector<double>& x, const std::vector<std::size_t>& idx,
                      double h) {
  return (4.0 * central(f, x, idx, 0.5 * h) - central(f, x, idx, h)) / 3.0;
}

/// Steps balancing truncation against cancellation for orders 1..3.
inline double step_for_order(std::size_t order) {
  switch (order) {
    case 1: return 1e-4;
    case 2: return 5e-4;
    default: return 2e-3;
  }
}

inline bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle
