#pragma once

// Dense coordinate tensors at a single point.
//
// Components are stored row-major: for rank r the flat offset of
// (i0, ..., i_{r-1}) is ((i0 * n + i1) * n + ...) + i_{r-1}. Each slot carries a
// variance flag; operations that pair slots check variance and throw
// NumericError on mismatch instead of coercing.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace superint {

enum class Variance : std::uint8_t { Upper, Lower };

inline constexpr std::size_t kMaxRank = 4;

class DenseTensor {
 public:
  DenseTensor() = default;
  DenseTensor(std::size_t dim, std::vector<Variance> variance);

  static DenseTensor scalar(double v, std::size_t dim);
  /// Rank-2 tensor with the given variances and identity components.
  static DenseTensor identity(std::size_t dim, Variance a, Variance b);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return variance_.size(); }
  const std::vector<Variance>& variance() const noexcept { return variance_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  template <typename... I>
  double& operator()(I... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <typename... I>
  double operator()(I... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  double& at(std::span<const std::size_t> idx) { return data_[offset(idx)]; }
  double at(std::span<const std::size_t> idx) const { return data_[offset(idx)]; }

  /// Decode a flat offset into per-slot indices.
  std::array<std::size_t, kMaxRank> unflatten(std::size_t flat) const;

  double max_abs() const;

  DenseTensor& operator+=(const DenseTensor& rhs);
  DenseTensor& operator-=(const DenseTensor& rhs);
  DenseTensor& operator*=(double s);
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(DenseTensor a, double s) { return a *= s; }
  friend DenseTensor operator*(double s, DenseTensor a) { return a *= s; }

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  std::size_t offset(std::span<const std::size_t> idx) const;
  std::size_t offset(std::initializer_list<std::size_t> idx) const {
    return offset(std::span<const std::size_t>(idx.begin(), idx.size()));
  }
  void require_same_shape(const DenseTensor& other) const;

  std::size_t dim_ = 0;
  std::vector<Variance> variance_;
  std::vector<double> data_;
};

/// Average over all permutations of the named slots.
DenseTensor symmetrize(const DenseTensor& t, std::span<const std::size_t> slots);
/// Signed average over all permutations of the named slots.
DenseTensor antisymmetrize(const DenseTensor& t, std::span<const std::size_t> slots);

/// Trace over an (upper, lower) slot pair; rank drops by two.
DenseTensor contract(const DenseTensor& t, std::size_t slot_up, std::size_t slot_down);

/// Flip the variance of one slot with the metric `g` (lower, rank 2).
/// Lowering multiplies by g; raising multiplies by g^{-1}, which is computed
/// here and rejected when g is numerically singular.
DenseTensor raise_lower(const DenseTensor& t, std::size_t slot, const DenseTensor& g);
DenseTensor lower_index(const DenseTensor& t, std::size_t slot, const DenseTensor& g);
DenseTensor raise_index(const DenseTensor& t, std::size_t slot, const DenseTensor& g_inv);

/// Reorder slots: result slot s takes source slot perm[s].
DenseTensor permute(const DenseTensor& t, std::span<const std::size_t> perm);

DenseTensor outer(const DenseTensor& a, const DenseTensor& b);

struct MetricInverse {
  DenseTensor inverse;
  double condition = 0.0;
};

/// Inverse of a symmetric rank-2 lower tensor together with its 2-norm
/// condition number. Throws NumericError above `max_condition`.
MetricInverse invert_metric(const DenseTensor& g, double max_condition = 1e12);

}  // namespace superint
