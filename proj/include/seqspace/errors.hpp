#pragma once
#include <stdexcept>
#include <string>

namespace seqspace {

// Construction ran out of its configured search budget (support size,
// iteration count, or a finite toy parameter pool).
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& m) : std::runtime_error(m) {}
};

// Malformed configuration / input document.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace seqspace
