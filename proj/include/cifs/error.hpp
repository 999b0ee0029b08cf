#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cifs {

// Stable machine-readable error categories; the CLI prints them verbatim.
enum class ErrorCode {
  kSyntax,
  kUnknownIdentifier,
  kDivisionByZero,
  kNotContraction,
  kDimensionMismatch,
  kInvalidArgument,
  kBudgetExceeded,
  kRefused,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure with the 0-based byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t position, const std::string& message)
      : Error(code, message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace cifs
