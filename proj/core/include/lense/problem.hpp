#pragma once

#include <string>
#include <string_view>

namespace lense {

enum class Problem { MVC, BMC, IM };

std::string_view to_string(Problem p) noexcept;

/// Accepts "mvc", "bmc", "im" in any case. Throws ConfigError otherwise.
Problem parse_problem(std::string_view name);

}  // namespace lense
