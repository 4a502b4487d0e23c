#include "superint/builtins.hpp"

#include <charconv>

#include "superint/error.hpp"

namespace superint {

namespace {

Expr compile(const std::string& text, const std::vector<std::string>& coords) {
  return validate(parse(text), coords, {});
}

std::string sum_of_squares(const std::vector<std::string>& coords) {
  std::string s;
  for (const auto& c : coords) s += (s.empty() ? "" : " + ") + c + "^2";
  return s;
}

std::vector<std::string> euclidean_upper(std::size_t n) {
  std::vector<std::string> m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.push_back(i == j ? "1" : "0");
  return m;
}

SystemDef smorodinski_winternitz(std::size_t n) {
  std::vector<std::string> coords;
  for (std::size_t i = 1; i <= n; ++i) coords.push_back("x" + std::to_string(i));
  std::vector<std::string> basis{"1", sum_of_squares(coords)};
  for (const auto& c : coords) basis.push_back("1/" + c + "^2");
  SystemDef sys = make_system("sw:" + std::to_string(n), coords, euclidean_upper(n), basis,
                              std::vector<Interval>(n, Interval{0.5, 2.0}), coords);
  for (std::size_t k = 0; k < n; ++k) {
    KillingDecl K;
    K.kind = KillingKind::Proper;
    K.label = "diag(e" + std::to_string(k + 1) + ")";
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        K.entries.push_back(compile(i == k && j == k ? "1" : "0", coords));
    sys.killing.push_back(std::move(K));
  }
  return sys;
}

}  // namespace

SystemDef make_system(const std::string& name, const std::vector<std::string>& coords,
                      const std::vector<std::string>& metric_upper,
                      const std::vector<std::string>& basis, const std::vector<Interval>& domain,
                      const std::vector<std::string>& excluded) {
  SystemDef sys;
  sys.name = name;
  sys.n = coords.size();
  sys.coords = coords;
  const std::size_t n = sys.n;
  if (metric_upper.size() != n * (n + 1) / 2) {
    throw ValidationError("system '" + name + "': metric needs n(n+1)/2 upper-triangle entries");
  }
  sys.metric.resize(n * n);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Expr e = compile(metric_upper[idx++], coords);
      sys.metric[i * n + j] = e;
      sys.metric[j * n + i] = e;
    }
  for (const auto& b : basis) {
    sys.basis.push_back(compile(b, coords));
    sys.basis_labels.push_back(b);
  }
  sys.domain = domain;
  for (const auto& x : excluded) sys.excluded.push_back(compile(x, coords));
  validate_system(sys);
  return sys;
}

SystemDef builtin_system(const std::string& name) {
  if (name.rfind("sw:", 0) == 0) {
    const std::string digits = name.substr(3);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw ValidationError("builtin '" + name + "': expected sw:<n> with an integer n");
    }
    if (n < 3) {
      throw ValidationError("builtin '" + name + "': dimension " + std::to_string(n) +
                            " not supported, n >= 3 is required");
    }
    return smorodinski_winternitz(n);
  }
  const std::vector<std::string> xyz{"x", "y", "z"};
  const std::string r2 = "(x^2 + y^2 + z^2)";
  if (name == "em1") {
    return make_system("em1", xyz, euclidean_upper(3),
                       {"(" + r2 + " - 1)/((" + r2 + " + 1)^2*sqrt" + r2 + ")", "1/x^2", "1/y^2",
                        "4/(" + r2 + " + 1)^2"},
                       std::vector<Interval>(3, Interval{0.3, 0.9}),
                       {"x", "y", "sqrt" + r2});
  }
  if (name == "osc-trivial") {
    return make_system("osc-trivial", xyz, euclidean_upper(3), {"1", "x", "y", "z", r2},
                       std::vector<Interval>(3, Interval{-1.0, 1.0}));
  }
  if (name == "sphere3") {
    const std::string c = "4/(1 + " + r2 + ")^2";
    return make_system("sphere3", xyz, {c, "0", "0", c, "0", c}, {},
                       std::vector<Interval>(3, Interval{-0.8, 0.8}));
  }
  if (name == "em2" || name == "em3") {
    throw ValidationError("builtin '" + name +
                          "': potential not available as a builtin; supply a file "
                          "(expected invariants: eta = 0, R = 0, Lap V = 0)");
  }
  throw ValidationError("unknown builtin system '" + name + "'");
}

std::vector<BuiltinInfo> list_builtins() {
  return {
      {"sw:<n>", "Smorodinski-Winternitz on Euclidean R^n, basis {1, r^2, 1/x_k^2}; non-degenerate, proper"},
      {"em1", "Escobar-Ruiz-Miller system I on Euclidean R^3; semi-degenerate, conformal"},
      {"osc-trivial", "Euclidean R^3 with basis {1, x, y, z, r^2}; all structure tensors vanish"},
      {"sphere3", "round 3-sphere in stereographic coordinates; curvature smoke test, no potential"},
      {"em2", "reserved: potential not available as a builtin; supply a file"},
      {"em3", "reserved: potential not available as a builtin; supply a file"},
  };
}

}  // namespace superint
