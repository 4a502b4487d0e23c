#pragma once

#include <string>
#include <vector>

#include "superint/system.hpp"

namespace superint {

/// Builtin systems: "sw:<n>" (n >= 3), "em1", "osc-trivial", "sphere3".
/// "em2" and "em3" are reserved and throw ValidationError.
SystemDef builtin_system(const std::string& name);

struct BuiltinInfo {
  std::string name;
  std::string description;
};

std::vector<BuiltinInfo> list_builtins();

/// Assemble and validate a system from expression strings. `metric_upper`
/// holds the n(n+1)/2 upper-triangle entries row by row.
SystemDef make_system(const std::string& name, const std::vector<std::string>& coords,
                      const std::vector<std::string>& metric_upper,
                      const std::vector<std::string>& basis, const std::vector<Interval>& domain,
                      const std::vector<std::string>& excluded = {});

}  // namespace superint
