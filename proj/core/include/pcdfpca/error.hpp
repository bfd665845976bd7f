#pragma once

#include <stdexcept>
#include <string>

namespace pcdfpca {

enum class ErrorKind {
  invalid_argument,
  underdetermined_fit,
  numerical_failure,
  insufficient_data,
  undefined_denominator,
  parse_error,
  validation,
};

/// Exception carrying a machine-readable error category. The CLI maps
/// categories onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

}  // namespace pcdfpca
