#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyx {

// Machine-readable failure categories. The CLI maps each one to a distinct
// exit code, so the numeric values are part of the tool's interface.
enum class ErrorCode : int {
  kInput = 2,             // malformed or non-finite arguments, dimension mismatch
  kPrecondition = 3,      // caller violated a documented precondition
  kEmptyPolyhedron = 4,
  kDegeneratePolyhedron = 5,  // non-empty but without interior
  kLinearDependence = 6,
  kBudgetExceeded = 7,
  kIllConditioned = 8,
  kLengthMismatch = 9,
  kUnknownDtype = 10,
  kMalformedJson = 11,
  kMalformedCsv = 12,
  kIo = 13,
  kInternal = 14,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace polyx
