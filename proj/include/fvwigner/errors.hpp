#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fvw {

/// Input outside the mathematical domain of an operation (bad sizes, negative eigenvalues, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical guard tripped: truncation tail, grid resolution, step bound, convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal findings (boundary tail mass, truncation tails). Callers decide what to do with them.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
  bool empty() const { return warnings.empty(); }
};

inline void warn(Diagnostics* diag, std::string msg) {
  if (diag != nullptr) diag->warn(std::move(msg));
}

}  // namespace fvw
