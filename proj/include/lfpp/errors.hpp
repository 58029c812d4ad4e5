#pragma once

#include <stdexcept>
#include <string>

namespace lfpp {

// Error taxonomy mirrors the process exit codes: bad arguments or
// preconditions (2), resource limits such as oversized grids (3), and
// numerical failure such as overflow or non-convergence (4).
struct usage_error : std::invalid_argument {
  explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lfpp
