#include "polyx/error.hpp"

namespace polyx {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInput: return "input";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kEmptyPolyhedron: return "empty_polyhedron";
    case ErrorCode::kDegeneratePolyhedron: return "degenerate_polyhedron";
    case ErrorCode::kLinearDependence: return "linear_dependence";
    case ErrorCode::kBudgetExceeded: return "budget_exceeded";
    case ErrorCode::kIllConditioned: return "ill_conditioned";
    case ErrorCode::kLengthMismatch: return "length_mismatch";
    case ErrorCode::kUnknownDtype: return "unknown_dtype";
    case ErrorCode::kMalformedJson: return "malformed_json";
    case ErrorCode::kMalformedCsv: return "malformed_csv";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace polyx
