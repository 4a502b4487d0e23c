#include "superint/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "superint/error.hpp"

namespace superint {

namespace {

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

int permutation_sign(std::span<const std::size_t> perm) {
  int sign = 1;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

void check_slots(const DenseTensor& t, std::span<const std::size_t> slots) {
  for (std::size_t s : slots) {
    if (s >= t.rank()) {
      throw NumericError("slot " + std::to_string(s) + " out of range for rank " +
                         std::to_string(t.rank()));
    }
    if (t.variance()[s] != t.variance()[slots[0]]) {
      throw NumericError("(anti)symmetrization over slots of different variance");
    }
  }
}

DenseTensor project(const DenseTensor& t, std::span<const std::size_t> slots, bool signed_sum) {
  check_slots(t, slots);
  const std::size_t m = slots.size();
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  DenseTensor out(t.dim(), t.variance());
  std::size_t count = 0;
  do {
    const double sign = signed_sum ? permutation_sign(perm) : 1.0;
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      auto idx = t.unflatten(flat);
      auto src = idx;
      for (std::size_t a = 0; a < m; ++a) src[slots[a]] = idx[slots[perm[a]]];
      out.data()[flat] += sign * t.at(std::span<const std::size_t>(src.data(), t.rank()));
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  out *= 1.0 / static_cast<double>(count);
  return out;
}

DenseTensor apply_metric(const DenseTensor& t, std::size_t slot, const DenseTensor& m,
                         Variance result) {
  if (slot >= t.rank()) throw NumericError("raise/lower: slot out of range");
  if (m.rank() != 2 || m.dim() != t.dim()) throw NumericError("raise/lower: metric shape mismatch");
  std::vector<Variance> var = t.variance();
  var[slot] = result;
  DenseTensor out(t.dim(), var);
  const std::size_t n = t.dim();
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    auto src = idx;
    double acc = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      src[slot] = a;
      acc += m(idx[slot], a) * t.at(std::span<const std::size_t>(src.data(), t.rank()));
    }
    out.data()[flat] = acc;
  }
  return out;
}

}  // namespace

DenseTensor::DenseTensor(std::size_t dim, std::vector<Variance> variance)
    : dim_(dim), variance_(std::move(variance)) {
  if (variance_.size() > kMaxRank) throw NumericError("DenseTensor: rank above 4");
  data_.assign(ipow(dim_, variance_.size()), 0.0);
}

DenseTensor DenseTensor::scalar(double v, std::size_t dim) {
  DenseTensor t(dim, {});
  t.data_[0] = v;
  return t;
}

DenseTensor DenseTensor::identity(std::size_t dim, Variance a, Variance b) {
  DenseTensor t(dim, {a, b});
  for (std::size_t i = 0; i < dim; ++i) t(i, i) = 1.0;
  return t;
}

std::size_t DenseTensor::offset(std::span<const std::size_t> idx) const {
  if (idx.size() != variance_.size()) {
    throw NumericError("DenseTensor: " + std::to_string(idx.size()) + " indices for rank " +
                       std::to_string(variance_.size()));
  }
  std::size_t flat = 0;
  for (std::size_t i : idx) {
    if (i >= dim_) throw NumericError("DenseTensor: index out of range");
    flat = flat * dim_ + i;
  }
  return flat;
}

std::array<std::size_t, kMaxRank> DenseTensor::unflatten(std::size_t flat) const {
  std::array<std::size_t, kMaxRank> idx{};
  for (std::size_t s = rank(); s-- > 0;) {
    idx[s] = flat % dim_;
    flat /= dim_;
  }
  return idx;
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

void DenseTensor::require_same_shape(const DenseTensor& other) const {
  if (dim_ != other.dim_ || variance_ != other.variance_) {
    throw NumericError("DenseTensor: shape or variance mismatch in arithmetic");
  }
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& rhs) {
  require_same_shape(rhs);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& rhs) {
  require_same_shape(rhs);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseTensor symmetrize(const DenseTensor& t, std::span<const std::size_t> slots) {
  return project(t, slots, false);
}

DenseTensor antisymmetrize(const DenseTensor& t, std::span<const std::size_t> slots) {
  return project(t, slots, true);
}

DenseTensor contract(const DenseTensor& t, std::size_t slot_up, std::size_t slot_down) {
  if (slot_up >= t.rank() || slot_down >= t.rank() || slot_up == slot_down) {
    throw NumericError("contract: invalid slot pair");
  }
  if (t.variance()[slot_up] != Variance::Upper || t.variance()[slot_down] != Variance::Lower) {
    throw NumericError("contract: slots must pair an upper with a lower index");
  }
  std::vector<Variance> var;
  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < t.rank(); ++s) {
    if (s != slot_up && s != slot_down) {
      var.push_back(t.variance()[s]);
      kept.push_back(s);
    }
  }
  DenseTensor out(t.dim(), var);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    std::array<std::size_t, kMaxRank> src{};
    for (std::size_t k = 0; k < kept.size(); ++k) src[kept[k]] = idx[k];
    double acc = 0.0;
    for (std::size_t a = 0; a < t.dim(); ++a) {
      src[slot_up] = a;
      src[slot_down] = a;
      acc += t.at(std::span<const std::size_t>(src.data(), t.rank()));
    }
    out.data()[flat] = acc;
  }
  return out;
}

DenseTensor lower_index(const DenseTensor& t, std::size_t slot, const DenseTensor& g) {
  if (slot >= t.rank() || t.variance()[slot] != Variance::Upper) {
    throw NumericError("lower_index: slot is not an upper index");
  }
  if (g.variance() != std::vector<Variance>{Variance::Lower, Variance::Lower}) {
    throw NumericError("lower_index: metric must be a lower rank-2 tensor");
  }
  return apply_metric(t, slot, g, Variance::Lower);
}

DenseTensor raise_index(const DenseTensor& t, std::size_t slot, const DenseTensor& g_inv) {
  if (slot >= t.rank() || t.variance()[slot] != Variance::Lower) {
    throw NumericError("raise_index: slot is not a lower index");
  }
  if (g_inv.variance() != std::vector<Variance>{Variance::Upper, Variance::Upper}) {
    throw NumericError("raise_index: inverse metric must be an upper rank-2 tensor");
  }
  return apply_metric(t, slot, g_inv, Variance::Upper);
}

DenseTensor raise_lower(const DenseTensor& t, std::size_t slot, const DenseTensor& g) {
  if (slot >= t.rank()) throw NumericError("raise_lower: slot out of range");
  if (t.variance()[slot] == Variance::Upper) return lower_index(t, slot, g);
  return raise_index(t, slot, invert_metric(g).inverse);
}

DenseTensor permute(const DenseTensor& t, std::span<const std::size_t> perm) {
  if (perm.size() != t.rank()) throw NumericError("permute: permutation length mismatch");
  std::vector<Variance> var(t.rank());
  for (std::size_t s = 0; s < t.rank(); ++s) var[s] = t.variance()[perm[s]];
  DenseTensor out(t.dim(), var);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    std::array<std::size_t, kMaxRank> src{};
    for (std::size_t s = 0; s < t.rank(); ++s) src[perm[s]] = idx[s];
    out.data()[flat] = t.at(std::span<const std::size_t>(src.data(), t.rank()));
  }
  return out;
}

DenseTensor outer(const DenseTensor& a, const DenseTensor& b) {
  if (a.dim() != b.dim()) throw NumericError("outer: dimension mismatch");
  std::vector<Variance> var = a.variance();
  var.insert(var.end(), b.variance().begin(), b.variance().end());
  DenseTensor out(a.dim(), var);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out.data()[i * b.size() + j] = a.data()[i] * b.data()[j];
  return out;
}

MetricInverse invert_metric(const DenseTensor& g, double max_condition) {
  if (g.rank() != 2) throw NumericError("invert_metric: rank-2 tensor required");
  const auto n = static_cast<Eigen::Index>(g.dim());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(n - 1);
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(smax > 0.0) || !(cond <= max_condition)) {
    throw NumericError("singular metric (condition number " + std::to_string(cond) + ")");
  }
  Eigen::MatrixXd inv = m.partialPivLu().inverse();
  std::vector<Variance> var(2, g.variance()[0] == Variance::Lower ? Variance::Upper : Variance::Lower);
  MetricInverse out{DenseTensor(g.dim(), var), cond};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.inverse(i, j) = 0.5 * (inv(i, j) + inv(j, i));
  return out;
}

}  // namespace superint
