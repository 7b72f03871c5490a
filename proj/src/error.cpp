#include "ope/error.hpp"

namespace ope {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidRange: return "invalid-range";
    case ErrorKind::kInvalidPrecision: return "invalid-precision";
    case ErrorKind::kInvalidDomain: return "invalid-domain";
    case ErrorKind::kOutOfDomain: return "out-of-domain";
    case ErrorKind::kParameterError: return "parameter-error";
    case ErrorKind::kDomainError: return "domain-error";
    case ErrorKind::kForeignCiphertext: return "foreign-ciphertext";
    case ErrorKind::kNotACiphertext: return "not-a-ciphertext";
    case ErrorKind::kDegenerateRange: return "degenerate-range";
    case ErrorKind::kPrecisionLimit: return "precision-limit";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kBudgetExceeded: return "budget-exceeded";
    case ErrorKind::kFormatError: return "format-error";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace ope
