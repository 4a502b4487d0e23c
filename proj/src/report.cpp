#include "superint/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "superint/error.hpp"

namespace superint {

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

namespace {

void write_check(std::ostringstream& os, const CheckResult& c, bool last) {
  os << "    {\n"
     << "      \"name\": " << json_string(c.name) << ",\n"
     << "      \"paper_ref\": " << json_string(c.paper_ref) << ",\n"
     << "      \"max_abs_residual\": " << json_number(c.max_abs_residual) << ",\n"
     << "      \"scale\": " << json_number(c.scale) << ",\n"
     << "      \"rel_residual\": " << json_number(c.rel_residual) << ",\n"
     << "      \"tolerance\": " << json_number(c.tolerance) << ",\n"
     << "      \"pass\": " << (c.pass ? "true" : "false") << ",\n"
     << "      \"points_evaluated\": " << c.points_evaluated << "\n"
     << "    }" << (last ? "\n" : ",\n");
}

void write_checks(std::ostringstream& os, const char* key, const std::vector<CheckResult>& cs) {
  os << "  \"" << key << "\": [";
  if (cs.empty()) {
    os << "],\n";
    return;
  }
  os << "\n";
  for (std::size_t i = 0; i < cs.size(); ++i) write_check(os, cs[i], i + 1 == cs.size());
  os << "  ],\n";
}

double number_or_nan(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

CheckResult read_check(const nlohmann::json& j, bool informational) {
  CheckResult c;
  c.name = j.at("name").get<std::string>();
  c.paper_ref = j.at("paper_ref").get<std::string>();
  c.max_abs_residual = number_or_nan(j.at("max_abs_residual"));
  c.scale = number_or_nan(j.at("scale"));
  c.rel_residual = number_or_nan(j.at("rel_residual"));
  c.tolerance = number_or_nan(j.at("tolerance"));
  c.pass = j.at("pass").get<bool>();
  c.points_evaluated = j.at("points_evaluated").get<std::size_t>();
  c.informational = informational;
  return c;
}

bool same_real(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

std::string report_to_json(const SuiteReport& r) {
  std::ostringstream os;
  os << "{\n"
     << "  \"system\": " << json_string(r.system) << ",\n"
     << "  \"mode\": " << json_string(r.mode) << ",\n"
     << "  \"seed\": " << r.seed << ",\n"
     << "  \"points\": " << r.points << ",\n"
     << "  \"sign_convention\": " << json_string(r.sign_convention) << ",\n"
     << "  \"classification\": {\n"
     << "    \"class\": " << json_string(r.classification) << ",\n"
     << "    \"per_point_ranks\": [";
  for (std::size_t i = 0; i < r.per_point_ranks.size(); ++i) os << (i ? ", " : "") << r.per_point_ranks[i];
  os << "],\n"
     << "    \"properness\": " << json_string(r.properness) << "\n"
     << "  },\n"
     << "  \"condition\": {\n"
     << "    \"min\": " << json_number(r.condition_min) << ",\n"
     << "    \"max\": " << json_number(r.condition_max) << "\n"
     << "  },\n";
  write_checks(os, "checks", r.results);
  write_checks(os, "diagnostics", r.diagnostics);
  os << "  \"summary\": {\n"
     << "    \"passed\": " << r.passed() << ",\n"
     << "    \"failed\": " << r.failed() << ",\n"
     << "    \"total\": " << r.results.size() << "\n"
     << "  }\n"
     << "}\n";
  return os.str();
}

SuiteReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what(), 0, 0, e.byte);
  }
  try {
    SuiteReport r;
    r.system = j.at("system").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.points = j.at("points").get<std::size_t>();
    r.sign_convention = j.at("sign_convention").get<std::string>();
    const auto& cls = j.at("classification");
    r.classification = cls.at("class").get<std::string>();
    r.per_point_ranks = cls.at("per_point_ranks").get<std::vector<int>>();
    r.properness = cls.at("properness").get<std::string>();
    r.condition_min = number_or_nan(j.at("condition").at("min"));
    r.condition_max = number_or_nan(j.at("condition").at("max"));
    for (const auto& c : j.at("checks")) r.results.push_back(read_check(c, false));
    for (const auto& c : j.at("diagnostics")) r.diagnostics.push_back(read_check(c, true));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what(), 0, 0, 0);
  }
}

std::string report_to_text(const SuiteReport& r) {
  std::ostringstream os;
  char buf[256];
  os << "system          " << r.system << "\n"
     << "classification  " << r.classification << " (mode " << r.mode << ")\n"
     << "properness      " << r.properness << "\n"
     << "seed / points   " << r.seed << " / " << r.points << "\n"
     << "convention      " << r.sign_convention << "\n";
  if (r.mode == "nondeg" || r.mode == "semideg") {
    std::snprintf(buf, sizeof buf, "condition       %.3g .. %.3g\n", r.condition_min, r.condition_max);
    os << buf;
  }
  os << "\n";
  auto table = [&](const std::vector<CheckResult>& cs) {
    std::snprintf(buf, sizeof buf, "  %-36s %-6s %12s %12s %10s %6s\n", "check", "result", "rel_resid",
                  "max_abs", "tolerance", "points");
    os << buf;
    for (const auto& c : cs) {
      std::snprintf(buf, sizeof buf, "  %-36s %-6s %12.3e %12.3e %10.1e %6zu\n", c.name.c_str(),
                    c.pass ? "pass" : "FAIL", c.rel_residual, c.max_abs_residual, c.tolerance,
                    c.points_evaluated);
      os << buf;
    }
  };
  table(r.results);
  if (!r.diagnostics.empty()) {
    os << "\ndiagnostics (not counted)\n";
    table(r.diagnostics);
  }
  os << "\n" << r.passed() << " passed, " << r.failed() << " failed, " << r.results.size() << " total\n";
  return os.str();
}

bool operator==(const CheckResult& a, const CheckResult& b) {
  return a.name == b.name && a.paper_ref == b.paper_ref && same_real(a.max_abs_residual, b.max_abs_residual) &&
         same_real(a.scale, b.scale) && same_real(a.rel_residual, b.rel_residual) &&
         same_real(a.tolerance, b.tolerance) && a.pass == b.pass &&
         a.points_evaluated == b.points_evaluated && a.informational == b.informational;
}

bool operator==(const SuiteReport& a, const SuiteReport& b) {
  return a.system == b.system && a.mode == b.mode && a.seed == b.seed && a.points == b.points &&
         a.sign_convention == b.sign_convention && a.classification == b.classification &&
         a.per_point_ranks == b.per_point_ranks && a.properness == b.properness &&
         same_real(a.condition_min, b.condition_min) && same_real(a.condition_max, b.condition_max) &&
         a.results == b.results && a.diagnostics == b.diagnostics;
}

}  // namespace superint
