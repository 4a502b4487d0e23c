#include "superint/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "superint/builtins.hpp"
#include "superint/error.hpp"
#include "superint/geometry.hpp"
#include "superint/report.hpp"
#include "superint/structure.hpp"
#include "superint/sysfile.hpp"
#include "superint/verify.hpp"

namespace superint {
namespace {

struct Options {
  std::string system;
  std::size_t points = 20;
  std::uint64_t seed = 42;
  bool json = false;
  std::vector<std::string> tol;
  std::string point;
};

double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ValidationError("malformed " + what + " '" + s + "'");
  }
  return v;
}

SystemDef load_with_overrides(const Options& o) {
  SystemDef sys = load_system(o.system);
  for (const auto& t : o.tol) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--tol expects NAME=VALUE, got '" + t + "'");
    sys.tolerances.set(t.substr(0, eq), parse_real(t.substr(eq + 1), "tolerance value"));
  }
  return sys;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%14.8g", v);
  return buf;
}

// ---- verify ----------------------------------------------------------------

int cmd_verify(const Options& o, std::ostream& out) {
  const SystemDef sys = load_with_overrides(o);
  const SuiteReport rep = run_suite(sys, o.points, o.seed);
  out << (o.json ? report_to_json(rep) : report_to_text(rep));
  return rep.all_passed() ? kExitOk : kExitFailed;
}

// ---- analyze ---------------------------------------------------------------

struct Analysis {
  DegeneracyClass cls;
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> agreeing;  // indices into points
  std::string properness = "n/a";
  double properness_residual = 0.0;
  double residual_max = 0.0;
  double condition_min = 0.0;
  double condition_max = 0.0;
};

Analysis analyze(const SystemDef& sys, std::size_t npoints, std::uint64_t seed) {
  if (!sys.has_potential()) throw ValidationError("system '" + sys.name + "' declares no potential to analyze");
  Analysis a;
  a.points = sample_points(sys, npoints, seed);
  a.cls = classify_degeneracy(sys, a.points);
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (a.cls.per_point_ranks[i] == a.cls.rank) a.agreeing.push_back(i);
  if (a.cls.kind == DegeneracyKind::HigherDegeneracy) return a;

  const StructureMode mode = a.cls.mode();
  std::vector<std::vector<double>> pts;
  a.condition_min = std::numeric_limits<double>::infinity();
  for (std::size_t i : a.agreeing) {
    const StructureSolution s = solve_structure_point(sys, a.points[i], mode);
    a.residual_max = std::max(a.residual_max, s.residual);
    a.condition_min = std::min(a.condition_min, s.condition);
    a.condition_max = std::max(a.condition_max, s.condition);
    pts.push_back(a.points[i]);
  }
  const CheckResult prop = check_properness(sys, pts, mode);
  a.properness = prop.pass ? "proper" : "conformal";
  a.properness_residual = prop.rel_residual;
  return a;
}

void json_array(std::ostream& os, const std::vector<double>& v) {
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << json_number(v[i]);
  os << "]";
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const SystemDef sys = load_with_overrides(o);
  const Analysis a = analyze(sys, o.points, o.seed);
  const bool semi = a.cls.kind == DegeneracyKind::SemiDegenerate;

  if (o.json) {
    out << "{\n"
        << "  \"system\": " << json_string(sys.name) << ",\n"
        << "  \"seed\": " << o.seed << ",\n"
        << "  \"points\": " << o.points << ",\n"
        << "  \"classification\": {\n"
        << "    \"class\": " << json_string(to_string(a.cls.kind)) << ",\n"
        << "    \"rank\": " << a.cls.rank << ",\n"
        << "    \"vote_fraction\": " << json_number(a.cls.vote_fraction) << ",\n"
        << "    \"per_point_ranks\": [";
    for (std::size_t i = 0; i < a.cls.per_point_ranks.size(); ++i)
      out << (i ? ", " : "") << a.cls.per_point_ranks[i];
    out << "]\n  },\n";
    if (semi) {
      out << "  \"semi_degeneracy\": {\n"
          << "    \"fit_residual\": " << json_number(a.cls.fit_residual) << ",\n"
          << "    \"samples\": [";
      bool first = true;
      for (std::size_t i : a.agreeing) {
        out << (first ? "\n" : ",\n") << "      {\"point\": ";
        json_array(out, a.points[i]);
        out << ", \"s\": ";
        json_array(out, a.cls.s[i]);
        out << ", \"alpha\": " << json_number(a.cls.alpha[i]) << "}";
        first = false;
      }
      out << "\n    ]\n  },\n";
    }
    out << "  \"properness\": " << json_string(a.properness) << ",\n"
        << "  \"properness_residual\": " << json_number(a.properness_residual) << ",\n"
        << "  \"solve\": {\n"
        << "    \"residual_max\": " << json_number(a.residual_max) << ",\n"
        << "    \"condition_min\": " << json_number(a.condition_min) << ",\n"
        << "    \"condition_max\": " << json_number(a.condition_max) << "\n"
        << "  }\n"
        << "}\n";
    return kExitOk;
  }

  char buf[160];
  out << "system          " << sys.name << " (n = " << sys.n << ", " << sys.basis.size() << " basis potentials)\n"
      << "classification  " << to_string(a.cls.kind) << " (rank " << a.cls.rank << ")\n";
  std::snprintf(buf, sizeof buf, "vote            %.2f of %zu points\n", a.cls.vote_fraction, a.points.size());
  out << buf << "per-point ranks ";
  for (int r : a.cls.per_point_ranks) out << r << ' ';
  out << "\n";
  if (a.cls.kind == DegeneracyKind::HigherDegeneracy) return kExitOk;

  if (semi) {
    std::snprintf(buf, sizeof buf, "\nLap V = g^-1(s, dV) + alpha V   (fit residual %.3e)\n", a.cls.fit_residual);
    out << buf << "  ";
    for (const auto& c : sys.coords) out << std::string(std::max<std::size_t>(1, 10 - c.size()), ' ') << c;
    for (const auto& c : sys.coords) out << std::string(std::max<std::size_t>(1, 12 - c.size() - 2), ' ') << "s_" << c;
    out << "         alpha\n";
    for (std::size_t i : a.agreeing) {
      out << "  ";
      for (double x : a.points[i]) {
        std::snprintf(buf, sizeof buf, "%10.5f", x);
        out << buf;
      }
      for (double s : a.cls.s[i]) {
        std::snprintf(buf, sizeof buf, "%12.6g", s);
        out << buf;
      }
      std::snprintf(buf, sizeof buf, "%14.8g\n", a.cls.alpha[i]);
      out << buf;
    }
  }
  out << "\nproperness      " << a.properness;
  std::snprintf(buf, sizeof buf, " (max scaled %s = %.3e)\n", semi ? "eta" : "tau", a.properness_residual);
  out << buf;
  std::snprintf(buf, sizeof buf, "solve residual  %.3e (max)\ncondition       %.3g .. %.3g\n", a.residual_max,
                a.condition_min, a.condition_max);
  out << buf;
  return kExitOk;
}

// ---- show ------------------------------------------------------------------

std::vector<double> parse_point(const SystemDef& sys, const std::string& text) {
  std::vector<double> x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) x.push_back(parse_real(item, "point coordinate"));
  if (x.size() != sys.n) {
    throw ValidationError("--point needs " + std::to_string(sys.n) + " comma-separated coordinates, got " +
                          std::to_string(x.size()));
  }
  if (!in_domain(sys, x)) throw DomainError("point (" + text + ") lies outside the domain of '" + sys.name + "'");
  for (const auto& e : sys.excluded) {
    if (std::abs(eval_value(e, x)) < sys.tolerances.exclusion) {
      throw DomainError("point (" + text + ") lies on the excluded locus " + print(e) + " = 0");
    }
  }
  for (const auto& e : sys.basis) {
    if (!std::isfinite(eval_value(e, x))) throw DomainError("potential is not finite at (" + text + ")");
  }
  return x;
}

void print_matrix(std::ostream& out, const std::string& title, const DenseTensor& t,
                  const std::vector<std::string>& coords) {
  out << title << "\n";
  const std::size_t n = t.dim();
  out << "        ";
  for (const auto& c : coords) out << std::string(std::max<std::size_t>(1, 15 - c.size()), ' ') << c;
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "  " << coords[i] << std::string(std::max<std::size_t>(1, 6 - coords[i].size()), ' ');
    for (std::size_t j = 0; j < n; ++j) out << ' ' << fmt(t(i, j));
    out << "\n";
  }
  out << "\n";
}

// Rank-3 tensor indexed (first, i, j): one matrix per value of the first slot.
void print_slices(std::ostream& out, const std::string& title, const DenseTensor& t,
                  const std::vector<std::string>& coords, bool last_slot) {
  const std::size_t n = t.dim();
  for (std::size_t k = 0; k < n; ++k) {
    DenseTensor m(n, {Variance::Lower, Variance::Lower});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = last_slot ? t(i, j, k) : t(k, i, j);
    print_matrix(out, title + "  [" + coords[k] + "]", m, coords);
  }
}

int cmd_show(const Options& o, std::ostream& out) {
  const SystemDef sys = load_with_overrides(o);
  if (o.point.empty()) throw ValidationError("show requires --point c1,c2,...");
  const std::vector<double> x = parse_point(sys, o.point);
  const auto& c = sys.coords;

  const MetricPointData m = metric_at(sys, x);
  const ConnectionPointData lc = christoffel(m);

  out << "system " << sys.name << " at (";
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ")\n\n";
  print_matrix(out, "g_ij", m.g, c);
  print_slices(out, "Gamma^k_ij (Levi-Civita)", lc.gamma, c, false);

  std::string label = "Levi-Civita";
  ConnectionPointData conn = lc;
  if (sys.has_potential()) {
    const auto pts = sample_points(sys, o.points, o.seed);
    const DegeneracyClass cls = classify_degeneracy(sys, pts);
    out << "classification " << to_string(cls.kind) << "\n\n";
    if (cls.kind != DegeneracyKind::HigherDegeneracy) {
      const StructureMode mode = cls.mode();
      const InducedConnection ic = build_connection(sys, x, mode);
      const bool nd = mode == StructureMode::NonDegenerate;
      print_slices(out, nd ? "T_ij^k" : "D_ij^k", ic.structure.T, c, true);
      print_matrix(out, nd ? "tau_ij" : "eta_ij", ic.structure.tau, c);
      if (!nd) {
        out << "s_k   ";
        for (double v : ic.structure.s) out << ' ' << fmt(v);
        out << "\nalpha  " << fmt(ic.structure.alpha) << "\n\n";
      }
      conn = ic.connection;
      label = nd ? "induced by T" : "induced by D";
      print_slices(out, "Gamma~^k_ij (" + label + ")", conn.gamma, c, false);
    }
  }

  const CurvatureBundle cb = contractions(curvature(conn), m);
  print_matrix(out, "Ric_ij (" + label + ")", cb.Ric, c);
  out << "Scal  " << fmt(cb.scal) << "\n\n";
  print_matrix(out, "B_ij (" + label + ")", cb.B, c);
  out << "trB   " << fmt(cb.trB) << "\n\n";
  const std::size_t n = sys.n;
  out << "Proj_ijkl (" << label << "), max |component| " << fmt(cb.Proj.max_abs()) << "\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      DenseTensor blk(n, {Variance::Lower, Variance::Lower});
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) blk(k, l) = cb.Proj(i, j, k, l);
      if (blk.max_abs() == 0.0) continue;
      print_matrix(out, "  (i, j) = (" + c[i] + ", " + c[j] + ")", blk, c);
    }
  return kExitOk;
}

// ---- list-builtin ----------------------------------------------------------

int cmd_list(std::ostream& out) {
  for (const auto& b : list_builtins()) {
    out << b.name << std::string(std::max<std::size_t>(2, 14 - b.name.size()), ' ') << b.description << "\n";
  }
  return kExitOk;
}

void add_common(CLI::App* sub, Options& o, bool with_json) {
  sub->add_option("system", o.system, "builtin name (see list-builtin) or system file")->required();
  sub->add_option("--points", o.points, "number of sample points")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "sampler seed");
  if (with_json) sub->add_flag("--json", o.json, "machine-readable output");
  sub->add_option("--tol", o.tol, "tolerance override NAME=VALUE (repeatable)")->take_all();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure tensors and identity checks for second-order superintegrable systems", "superint"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  Options o;

  auto* verify = app.add_subcommand("verify", "run every identity check at sampled points");
  add_common(verify, o, true);
  auto* analyze_cmd = app.add_subcommand("analyze", "classify the potential space and fit the structure tensors");
  add_common(analyze_cmd, o, true);
  auto* show = app.add_subcommand("show", "print the geometric tensors at one point");
  add_common(show, o, false);
  show->add_option("--point", o.point, "comma-separated coordinates")->required();
  auto* list = app.add_subcommand("list-builtin", "list builtin systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
      err << sub->help();
    else
      err << app.help();
    return kExitInput;
  }

  try {
    if (verify->parsed()) return cmd_verify(o, out);
    if (analyze_cmd->parsed()) return cmd_analyze(o, out);
    if (show->parsed()) return cmd_show(o, out);
    if (list->parsed()) return cmd_list(out);
  } catch (const ClassificationError& e) {
    err << "classification error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInput;
}

}  // namespace superint
