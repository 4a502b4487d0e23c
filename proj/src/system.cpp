#include "superint/system.hpp"

#include <cmath>

#include "superint/error.hpp"

namespace superint {

std::string to_string(KillingKind k) { return k == KillingKind::Proper ? "proper" : "conformal"; }

double Tolerances::for_check(const std::string& name, double fallback) const {
  auto it = per_check.find(name);
  return it == per_check.end() ? fallback : it->second;
}

void Tolerances::set(const std::string& name, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError("tolerance '" + name + "' must be a positive finite number");
  }
  if (name == "identity") identity = value;
  else if (name == "jet_solve") jet_solve = value;
  else if (name == "rank") rank = value;
  else if (name == "vote") vote = value;
  else if (name == "exclusion") exclusion = value;
  else if (name == "condition") condition = value;
  else if (name == "properness") properness = value;
  else per_check[name] = value;
}

void validate_system(const SystemDef& sys) {
  if (sys.n < 3) {
    throw ValidationError("system '" + sys.name + "': dimension " + std::to_string(sys.n) +
                          " not supported, n >= 3 is required");
  }
  if (sys.coords.size() != sys.n) throw ValidationError("coordinate count does not match dimension");
  if (sys.metric.size() != sys.n * sys.n) throw ValidationError("metric must have n*n entries");
  for (const auto& e : sys.metric)
    if (!e.validated()) throw ValidationError("metric entries must be validated expressions");
  for (std::size_t i = 0; i < sys.n; ++i)
    for (std::size_t j = i + 1; j < sys.n; ++j)
      if (!structurally_equal(sys.metric_entry(i, j).root(), sys.metric_entry(j, i).root()))
        throw ValidationError("metric is not symmetric");
  if (sys.has_potential() && sys.basis.size() < sys.n + 1) {
    throw ValidationError("potential basis has " + std::to_string(sys.basis.size()) +
                          " elements; at least n+1 = " + std::to_string(sys.n + 1) + " are required");
  }
  if (sys.domain.size() != sys.n) throw ValidationError("domain must give one interval per coordinate");
  for (const auto& iv : sys.domain)
    if (!(iv.lo < iv.hi)) throw ValidationError("domain interval is empty");
  for (const auto& k : sys.killing) {
    if (k.entries.size() != sys.n * sys.n) {
      throw ValidationError("Killing tensor '" + k.label + "' must have n*n entries");
    }
  }
}

bool in_domain(const SystemDef& sys, const std::vector<double>& x) {
  if (x.size() != sys.n) return false;
  for (std::size_t i = 0; i < sys.n; ++i)
    if (!(x[i] >= sys.domain[i].lo && x[i] <= sys.domain[i].hi)) return false;
  return true;
}

PointSampler::PointSampler(const SystemDef& sys, std::uint64_t seed) : sys_(sys), state_(seed) {}

// splitmix64: fixed, platform-independent stream for a given seed.
double PointSampler::uniform01() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

bool PointSampler::acceptable(const std::vector<double>& x) const {
  try {
    for (const auto& e : sys_.excluded)
      if (std::abs(eval_value(e, x)) < sys_.tolerances.exclusion) return false;
    for (const auto& e : sys_.metric) (void)eval_value(e, x);
    for (const auto& e : sys_.basis) {
      const double v = eval_value(e, x);
      if (!std::isfinite(v)) return false;
    }
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

std::optional<std::vector<double>> PointSampler::next(std::size_t max_attempts) {
  std::vector<double> x(sys_.n);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = 0; i < sys_.n; ++i) {
      const auto& iv = sys_.domain[i];
      x[i] = iv.lo + (iv.hi - iv.lo) * uniform01();
    }
    if (acceptable(x)) return x;
    ++rejected_;
  }
  return std::nullopt;
}

std::vector<std::vector<double>> sample_points(const SystemDef& sys, std::size_t count,
                                               std::uint64_t seed) {
  PointSampler sampler(sys, seed);
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    auto p = sampler.next();
    if (!p) {
      throw Error("system '" + sys.name + "': all sample points rejected; the domain is too small or lies on excluded loci");
    }
    pts.push_back(std::move(*p));
  }
  return pts;
}

}  // namespace superint
