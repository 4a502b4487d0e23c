#include "superint/geometry.hpp"

#include <string>

#include "superint/error.hpp"

namespace superint {

namespace {

constexpr Variance L = Variance::Lower;
constexpr Variance U = Variance::Upper;

}  // namespace

MetricPointData metric_at(const SystemDef& sys, std::span<const double> point) {
  return metric_at(sys.metric, sys.n, point, sys.tolerances.condition);
}

MetricPointData metric_at(std::span<const Expr> metric, std::size_t n,
                          std::span<const double> point, double max_condition) {
  if (metric.size() != n * n || point.size() != n) {
    throw NumericError("metric_at: expected " + std::to_string(n * n) + " entries and an n-point");
  }
  MetricPointData m{DenseTensor(n, {L, L}), DenseTensor(n, {U, U}), DenseTensor(n, {L, L, L}),
                    DenseTensor(n, {L, L, L, L}), DenseTensor(n, {L, U, U}), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Jet3 gij = eval_jet(metric[i * n + j], point);
      for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        m.g(a, b) = gij.value();
        for (std::size_t k = 0; k < n; ++k) {
          m.dg(k, a, b) = gij.grad(k);
          for (std::size_t l = 0; l < n; ++l) m.d2g(k, l, a, b) = gij.hess(k, l);
        }
      }
    }
  }
  MetricInverse inv = invert_metric(m.g, max_condition);
  m.g_inv = std::move(inv.inverse);
  m.condition = inv.condition;
  // d g^{-1} = -g^{-1} (d g) g^{-1}
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) acc += m.g_inv(i, a) * m.dg(k, a, b) * m.g_inv(b, j);
        m.dg_inv(k, i, j) = -acc;
      }
  return m;
}

ConnectionPointData christoffel(const MetricPointData& m) {
  const std::size_t n = m.dim();
  ConnectionPointData c{DenseTensor(n, {U, L, L}), DenseTensor(n, {L, U, L, L})};
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l)
          acc += m.g_inv(k, l) * (m.dg(i, j, l) + m.dg(j, i, l) - m.dg(l, i, j));
        c.gamma(k, i, j) = 0.5 * acc;
      }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (std::size_t l = 0; l < n; ++l) {
            acc += m.dg_inv(p, k, l) * (m.dg(i, j, l) + m.dg(j, i, l) - m.dg(l, i, j));
            acc += m.g_inv(k, l) * (m.d2g(p, i, j, l) + m.d2g(p, j, i, l) - m.d2g(p, l, i, j));
          }
          c.dgamma(p, k, i, j) = 0.5 * acc;
        }
  return c;
}

ConnectionPointData induced_connection(const ConnectionPointData& lc, const TensorField& S,
                                       InducedSign sign) {
  const std::size_t n = lc.gamma.dim();
  const double s = static_cast<double>(static_cast<int>(sign));
  if (S.value.rank() != 3 || S.partials.rank() != 4 || S.value.dim() != n) {
    throw NumericError("induced_connection: structure tensor must be rank 3 with partials");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (S.value(i, j, k) != S.value(j, i, k)) {
          throw NumericError("induced_connection: structure tensor is not symmetric in its lower pair");
        }
  ConnectionPointData c = lc;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        c.gamma(k, i, j) += s * S.value(i, j, k);
        for (std::size_t l = 0; l < n; ++l) c.dgamma(l, k, i, j) += s * S.partials(l, i, j, k);
      }
  return c;
}

DenseTensor curvature(const ConnectionPointData& c) {
  const std::size_t n = c.gamma.dim();
  DenseTensor R(n, {U, L, L, L});
  const auto& G = c.gamma;
  const auto& dG = c.dgamma;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
          double acc = dG(j, b, k, i) - dG(k, b, j, i);
          for (std::size_t a = 0; a < n; ++a) acc += G(b, j, a) * G(a, k, i) - G(b, k, a) * G(a, j, i);
          R(b, i, j, k) = acc;
          R(b, i, k, j) = -acc;
        }
  return R;
}

CurvatureBundle contractions(const DenseTensor& R, const MetricPointData& m) {
  const std::size_t n = m.dim();
  if (n < 3) throw NumericError("contractions: dimension n >= 3 required");
  CurvatureBundle cb;
  cb.R = R;
  cb.Riem = lower_index(R, 0, m.g);
  cb.Ric = contract(R, 0, 2);
  cb.scal = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cb.scal += m.g_inv(i, j) * cb.Ric(i, j);
  cb.B_up = DenseTensor(n, {U, L});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) acc += m.g_inv(i, j) * R(b, i, j, k);
      cb.B_up(b, k) = acc;
    }
  cb.B = lower_index(cb.B_up, 0, m.g);
  cb.trB = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cb.trB += m.g_inv(i, j) * cb.B(i, j);
  const double w = 1.0 / static_cast<double>(n - 1);
  cb.Proj = DenseTensor(n, {L, L, L, L});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          cb.Proj(i, j, k, l) =
              cb.Riem(i, j, k, l) - w * (cb.Ric(j, l) * m.g(i, k) - cb.Ric(j, k) * m.g(i, l));
  return cb;
}

CovariantHessian covariant_hessian(const Jet3& V, const ConnectionPointData& c,
                                   const MetricPointData& m) {
  const std::size_t n = m.dim();
  if (V.dim() != n) throw NumericError("covariant_hessian: dimension mismatch");
  CovariantHessian h{DenseTensor(n, {L, L}), 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = V.hess(i, j);
      for (std::size_t a = 0; a < n; ++a) acc -= c.gamma(a, i, j) * V.grad(a);
      h.hessian(i, j) = acc;
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h.laplacian += m.g_inv(i, j) * h.hessian(i, j);
  return h;
}

std::vector<double> laplacian_gradient(const Jet3& V, const ConnectionPointData& c,
                                       const MetricPointData& m) {
  const std::size_t n = m.dim();
  const CovariantHessian h = covariant_hessian(V, c, m);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double dh = V.third(k, i, j);
        for (std::size_t a = 0; a < n; ++a) {
          dh -= c.dgamma(k, a, i, j) * V.grad(a) + c.gamma(a, i, j) * V.hess(a, k);
        }
        acc += m.dg_inv(k, i, j) * h.hessian(i, j) + m.g_inv(i, j) * dh;
      }
    out[k] = acc;
  }
  return out;
}

DenseTensor covariant_d(const TensorField& field, const ConnectionPointData& c) {
  const DenseTensor& t = field.value;
  const std::size_t n = t.dim();
  const std::size_t r = t.rank();
  if (r > 3) throw NumericError("covariant_d: rank of the field must be at most 3");
  if (field.partials.rank() != r + 1 || field.partials.dim() != n) {
    throw NumericError("covariant_d: field is missing its partial derivatives");
  }
  std::vector<Variance> var{L};
  var.insert(var.end(), t.variance().begin(), t.variance().end());
  DenseTensor out(n, var);
  std::array<std::size_t, kMaxRank> src{};
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto idx = out.unflatten(flat);
    const std::size_t k = idx[0];
    double acc = field.partials.data()[flat];
    for (std::size_t s = 0; s < r; ++s) {
      for (std::size_t q = 0; q < r; ++q) src[q] = idx[q + 1];
      const std::size_t fixed = idx[s + 1];
      for (std::size_t a = 0; a < n; ++a) {
        src[s] = a;
        const double ta = t.at(std::span<const std::size_t>(src.data(), r));
        if (t.variance()[s] == U) {
          acc += c.gamma(fixed, k, a) * ta;
        } else {
          acc -= c.gamma(a, k, fixed) * ta;
        }
      }
    }
    out.data()[flat] = acc;
  }
  return out;
}

DenseTensor exterior_d(const TensorField& oneform) {
  const std::size_t n = oneform.value.dim();
  if (oneform.value.rank() != 1 || oneform.value.variance()[0] != L) {
    throw NumericError("exterior_d: a one-form is required");
  }
  if (oneform.partials.rank() != 2 || oneform.partials.dim() != n) {
    throw NumericError("exterior_d: one-form is missing its partial derivatives");
  }
  DenseTensor out(n, {L, L});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = oneform.partials(i, j) - oneform.partials(j, i);
  return out;
}

TensorField metric_field(const MetricPointData& m) { return TensorField{m.g, m.dg}; }

}  // namespace superint
