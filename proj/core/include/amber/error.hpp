#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace amber {

enum class ErrorCode {
  InvalidArgument,
  NoNumericStructure,
  DomainMismatch,
  ZeroMass,
  SchemeMismatch,
  InvalidWeights,
  UnknownDescriptor,
  MajorEqualsMinor,
  PolicyUnsupported,
  EmptyCategory,
  GridMismatch,
  InsufficientData,
  DegenerateTrace,
  NonNumericalAttribute,
  EmptySegment,
  SizeMismatch,
  IndexOutOfRange,
  DescriptorMismatch,
  UnsupportedPair,
  NegativeVariance,
  ParseError,
  MissingColumn,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `line` is the 1-based source line for
/// file-ingestion errors and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  /// The message without the code/line prefix carried by what().
  [[nodiscard]] const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::size_t line_;
  std::string message_;
};

}  // namespace amber
