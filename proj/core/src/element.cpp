#include "amber/element.hpp"

#include <charconv>

#include "amber/error.hpp"

namespace amber {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoNumericStructure: return "NoNumericStructure";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::SchemeMismatch: return "SchemeMismatch";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::UnknownDescriptor: return "UnknownDescriptor";
    case ErrorCode::MajorEqualsMinor: return "MajorEqualsMinor";
    case ErrorCode::PolicyUnsupported: return "PolicyUnsupported";
    case ErrorCode::EmptyCategory: return "EmptyCategory";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateTrace: return "DegenerateTrace";
    case ErrorCode::NonNumericalAttribute: return "NonNumericalAttribute";
    case ErrorCode::EmptySegment: return "EmptySegment";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DescriptorMismatch: return "DescriptorMismatch";
    case ErrorCode::UnsupportedPair: return "UnsupportedPair";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format_error(ErrorCode code, const std::string& message, std::size_t line) {
  std::string out(to_string(code));
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(format_error(code, message, line)), code_(code), line_(line), message_(message) {}

double Element::as_value() const {
  if (const auto* v = std::get_if<double>(&repr_)) return *v;
  throw Error(ErrorCode::DomainMismatch, "expected a real value, got level '" + std::get<std::string>(repr_) + "'");
}

const std::string& Element::as_level() const {
  if (const auto* s = std::get_if<std::string>(&repr_)) return *s;
  throw Error(ErrorCode::DomainMismatch, "expected a level name, got value " + to_string());
}

std::string Element::to_string() const {
  if (const auto* s = std::get_if<std::string>(&repr_)) return *s;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), std::get<double>(repr_));
  return std::string(buf, res.ptr);
}

}  // namespace amber
