#include "pcdfpca/error.hpp"

namespace pcdfpca {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::underdetermined_fit: return "underdetermined-fit";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::undefined_denominator: return "undefined-denominator";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::validation: return "validation";
  }
  return "unknown";
}

}  // namespace pcdfpca
