#include "lense/problem.hpp"

#include <algorithm>
#include <cctype>

#include "lense/errors.hpp"

namespace lense {

std::string_view to_string(Problem p) noexcept {
  switch (p) {
    case Problem::MVC: return "mvc";
    case Problem::BMC: return "bmc";
    case Problem::IM: return "im";
  }
  return "?";
}

Problem parse_problem(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "mvc") return Problem::MVC;
  if (lower == "bmc") return Problem::BMC;
  if (lower == "im") return Problem::IM;
  throw ConfigError("unknown problem '" + std::string(name) + "' (expected mvc, bmc or im)");
}

}  // namespace lense
