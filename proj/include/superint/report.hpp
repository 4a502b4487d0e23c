#pragma once

// Report serialization. Key order is fixed and every real is written with 17
// significant digits, so equal reports serialize to identical bytes.

#include <string>

#include "superint/verify.hpp"

namespace superint {

std::string report_to_json(const SuiteReport& r);

/// Inverse of report_to_json; throws ParseError on malformed input.
SuiteReport report_from_json(const std::string& text);

/// Human-readable table.
std::string report_to_text(const SuiteReport& r);

/// %.17g, with "null" for non-finite values.
std::string json_number(double v);
std::string json_string(const std::string& s);

bool operator==(const CheckResult& a, const CheckResult& b);
bool operator==(const SuiteReport& a, const SuiteReport& b);

}  // namespace superint
