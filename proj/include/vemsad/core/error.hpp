#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vemsad {

/// Coarse failure classes. The CLI maps them to exit codes and prints the
/// category name so scripts can branch on it.
enum class ErrorCategory {
  Config,
  Mesh,
  Io,
  Constitutive,
  Solver,
  Convergence,
};

inline std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Mesh: return "mesh";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Constitutive: return "constitutive";
    case ErrorCategory::Solver: return "solver";
    case ErrorCategory::Convergence: return "convergence";
  }
  return "unknown";
}

inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Mesh: return 3;
    case ErrorCategory::Io: return 4;
    case ErrorCategory::Constitutive: return 5;
    case ErrorCategory::Solver: return 6;
    case ErrorCategory::Convergence: return 7;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace vemsad
