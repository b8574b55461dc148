#pragma once

#include <compare>
#include <string>
#include <variant>

namespace amber {

inline constexpr const char* kAbsent = "ABSENT";
inline constexpr const char* kPresent = "PRESENT";

/// One member of an attribute descriptor set: either a named level
/// (categorical/ordinal) or a real value (numerical). Equality is exact.
class Element {
 public:
  Element() : repr_(0.0) {}

  static Element value(double v) { return Element(v); }
  static Element level(std::string name) { return Element(std::move(name)); }

  [[nodiscard]] bool is_value() const noexcept { return std::holds_alternative<double>(repr_); }
  [[nodiscard]] bool is_level() const noexcept { return !is_value(); }

  /// Throws amber::Error(DomainMismatch) when the element is a level.
  [[nodiscard]] double as_value() const;
  /// Throws amber::Error(DomainMismatch) when the element is a value.
  [[nodiscard]] const std::string& as_level() const;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Element&, const Element&) = default;

 private:
  explicit Element(double v) : repr_(v) {}
  explicit Element(std::string s) : repr_(std::move(s)) {}

  std::variant<double, std::string> repr_;
};

}  // namespace amber
