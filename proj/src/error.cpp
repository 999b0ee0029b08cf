#include "cifs/error.hpp"

namespace cifs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "E_SYNTAX";
    case ErrorCode::kUnknownIdentifier: return "E_UNKNOWN_IDENTIFIER";
    case ErrorCode::kDivisionByZero: return "E_DIVISION_BY_ZERO";
    case ErrorCode::kNotContraction: return "E_NOT_CONTRACTION";
    case ErrorCode::kDimensionMismatch: return "E_DIMENSION_MISMATCH";
    case ErrorCode::kInvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::kBudgetExceeded: return "E_BUDGET_EXCEEDED";
    case ErrorCode::kRefused: return "E_REFUSED";
    case ErrorCode::kConfig: return "E_CONFIG";
    case ErrorCode::kIo: return "E_IO";
  }
  return "E_UNKNOWN";
}

}  // namespace cifs
