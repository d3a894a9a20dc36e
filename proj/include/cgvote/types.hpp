#pragma once

#include <stdexcept>
#include <string>

namespace cgvote {

/// Raised when input data (files, matrices, configuration values) fails
/// validation. The CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// How exact ties in an argmax are resolved.
enum class TieRule {
  LowestIndex,   // default: first index attaining the maximum
  HighestIndex,  // last index attaining the maximum
};

std::string_view to_string(TieRule rule);
TieRule tie_rule_from_string(std::string_view name);

}  // namespace cgvote
