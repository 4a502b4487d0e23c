#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <limits>
#include <string>

#include "superint/builtins.hpp"
#include "superint/error.hpp"
#include "superint/report.hpp"
#include "superint/verify.hpp"

using namespace superint;

TEST(Report, NumberFormatting) {
  EXPECT_EQ(json_number(0.1), "0.10000000000000001");
  EXPECT_EQ(json_number(1.0), "1");
  EXPECT_EQ(json_number(-2.5e-300), "-2.5e-300");
  EXPECT_EQ(json_number(std::numeric_limits<double>::infinity()), "null");
  EXPECT_EQ(json_number(std::nan("")), "null");
  // 17 significant digits round-trip exactly.
  const double v = 1.0 / 3.0;
  EXPECT_EQ(std::stod(json_number(v)), v);
}

TEST(Report, StringEscaping) {
  EXPECT_EQ(json_string("a\"b\\c\n"), "\"a\\\"b\\\\c\\n\"");
  EXPECT_EQ(json_string(std::string("\x01", 1)), "\"\\u0001\"");
  EXPECT_EQ(nlohmann::json::parse(json_string("d_j G^b_ki - \"x\"")).get<std::string>(), "d_j G^b_ki - \"x\"");
}

TEST(Report, RoundTripPreservesEveryField) {
  for (const char* name : {"sw:3", "em1", "sphere3"}) {
    SCOPED_TRACE(name);
    const SuiteReport r = run_suite(builtin_system(name), 10, 42);
    const std::string text = report_to_json(r);
    const SuiteReport back = report_from_json(text);
    EXPECT_TRUE(back == r);
    EXPECT_EQ(report_to_json(back), text);
  }
}

TEST(Report, KeyOrderIsStable) {
  const std::string text = report_to_json(run_suite(builtin_system("em1"), 10, 42));
  std::size_t last = 0;
  for (const char* key : {"\"system\"", "\"mode\"", "\"seed\"", "\"points\"", "\"sign_convention\"",
                          "\"classification\"", "\"class\"", "\"per_point_ranks\"", "\"properness\"",
                          "\"condition\"", "\"checks\"", "\"diagnostics\"", "\"summary\"", "\"passed\"",
                          "\"failed\"", "\"total\""}) {
    const std::size_t at = text.find(key, last);
    ASSERT_NE(at, std::string::npos) << key;
    last = at;
  }
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j.at("summary").at("total").get<std::size_t>(), j.at("checks").size());
  EXPECT_EQ(j.at("mode"), "semideg");
  EXPECT_EQ(j.at("checks").at(0).size(), 8u);
  // Field order inside the first check entry, read from the text.
  const std::size_t begin = text.find("\"checks\"");
  const std::size_t end = text.find('}', begin);
  last = begin;
  for (const char* key : {"\"name\"", "\"paper_ref\"", "\"max_abs_residual\"", "\"scale\"", "\"rel_residual\"",
                          "\"tolerance\"", "\"pass\"", "\"points_evaluated\""}) {
    const std::size_t at = text.find(key, last);
    ASSERT_LT(at, end) << key;
    last = at;
  }
}

TEST(Report, NonFiniteResidualSurvivesRoundTrip) {
  SuiteReport r;
  r.system = "x";
  r.mode = "none";
  r.classification = "none";
  r.properness = "n/a";
  CheckResult c;
  c.name = "nan-check";
  c.rel_residual = std::nan("");
  c.max_abs_residual = std::numeric_limits<double>::infinity();
  c.pass = false;
  r.results.push_back(c);
  const SuiteReport back = report_from_json(report_to_json(r));
  EXPECT_TRUE(std::isnan(back.results[0].rel_residual));
  // Infinity serializes as null and comes back as NaN.
  EXPECT_TRUE(std::isnan(back.results[0].max_abs_residual));
}

TEST(Report, MalformedDocumentsRejected) {
  EXPECT_THROW(report_from_json("{"), ParseError);
  EXPECT_THROW(report_from_json("{\"system\": 1}"), ParseError);
  EXPECT_THROW(report_from_json("[]"), ParseError);
}

TEST(Report, TextTableListsEveryCheck) {
  const SuiteReport r = run_suite(builtin_system("sw:3"), 10, 42);
  const std::string text = report_to_text(r);
  for (const auto& c : r.results) EXPECT_NE(text.find(c.name), std::string::npos);
  EXPECT_NE(text.find("diagnostics (not counted)"), std::string::npos);
  EXPECT_NE(text.find(std::to_string(r.passed()) + " passed"), std::string::npos);
}
