#pragma once

// System definition files: a small TOML subset.
//
//   [system]      name, dimension, coordinates = ["x", "y", "z"]
//   [metric]      g_i_j = "expr" (1-based indices or coordinate names,
//                 upper triangle; off-diagonal default 0, diagonal 1)
//   [potential]   basis = ["expr", ...]
//                 or potential = "expr" with params = ["a0", ...]
//   [domain]      <coord> = [lo, hi] for every coordinate,
//                 excluded = ["expr", ...]
//   [[killing]]   kind = "proper" | "conformal", label = "...",
//                 K_i_j = "expr" (upper triangle, default 0)
//   [tolerances]  name = value (scalar fields or check names)

#include <string>
#include <vector>

#include "superint/system.hpp"

namespace superint {

/// Parse system-file text. `origin` names the source in diagnostics.
SystemDef parse_system_text(const std::string& text, const std::string& origin = "<input>");

SystemDef load_system_file(const std::string& path);

/// Builtin name or path to a system file.
SystemDef load_system(const std::string& ref);

}  // namespace superint
