#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ope {

enum class ErrorKind {
  kInvalidRange,
  kInvalidPrecision,
  kInvalidDomain,
  kOutOfDomain,
  kParameterError,
  kDomainError,
  kForeignCiphertext,
  kNotACiphertext,
  kDegenerateRange,
  kPrecisionLimit,
  kEmptyInput,
  kBudgetExceeded,
  kFormatError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace ope
