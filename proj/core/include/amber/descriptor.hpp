#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "amber/element.hpp"

namespace amber {

/// Tolerance for proximity checks on reals (sums of weights, ties, bounds).
inline constexpr double kTolerance = 1e-9;

enum class DescriptorKind { Categorical, Numerical, Ordinal };

std::string_view to_string(DescriptorKind kind) noexcept;
DescriptorKind descriptor_kind_from_string(std::string_view text);

/// Affine map of a numerical interval [alpha, beta] onto [a, b].
struct AffineMap {
  double a = -1.0;
  double b = 1.0;

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Explicit level -> real table for finite descriptors. Entries follow the
/// descriptor's level order.
struct TableMap {
  std::vector<std::pair<std::string, double>> values;

  friend bool operator==(const TableMap&, const TableMap&) = default;
};

using NumericMap = std::variant<AffineMap, TableMap>;

/// One ordered label set X^(n). Categorical descriptors have exactly the
/// levels ABSENT < PRESENT; ordinal descriptors list their levels low to
/// high; numerical descriptors have no levels and carry bounds.
struct AttributeDescriptor {
  std::string name;
  DescriptorKind kind = DescriptorKind::Numerical;
  std::vector<std::string> levels;
  std::optional<std::pair<double, double>> bounds;
  std::optional<NumericMap> numeric_map;

  friend bool operator==(const AttributeDescriptor&, const AttributeDescriptor&) = default;
};

AttributeDescriptor make_categorical(std::string name);
/// Defaults to [-1, 1] with the identity map.
AttributeDescriptor make_numerical(std::string name, double alpha = -1.0, double beta = 1.0);
/// Identity-style affine map onto [a, b].
AttributeDescriptor make_numerical(std::string name, double alpha, double beta, AffineMap map);
AttributeDescriptor make_ordinal(std::string name, std::vector<std::string> levels);

/// Returns a copy of an ordinal (or categorical) descriptor with an explicit
/// level -> real table attached. This is never inferred: attaching a map
/// asserts a distance the ordinal scale does not have, so it is logged.
AttributeDescriptor attach_numeric_map(const AttributeDescriptor& d, TableMap map);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
  void merge(const ValidationReport& other);
};

ValidationReport validate_descriptor(const AttributeDescriptor& d);

/// Throws Error(InvalidArgument) listing all violations when d is invalid.
void require_valid(const AttributeDescriptor& d);

[[nodiscard]] bool is_finite_kind(const AttributeDescriptor& d) noexcept;

/// Membership in X^(n). Numerical membership is the closed interval
/// [alpha, beta] widened by kTolerance.
[[nodiscard]] bool contains(const AttributeDescriptor& d, const Element& x);

/// Position of a level in the descriptor order; Error(DomainMismatch) if absent.
[[nodiscard]] std::size_t level_index(const AttributeDescriptor& d, const std::string& level);

/// x_i precedes-or-equals x_j in the descriptor order.
[[nodiscard]] bool precedes_or_equal(const AttributeDescriptor& d, const Element& xi, const Element& xj);

/// f_n(x). Error(NoNumericStructure) when d has no numeric map,
/// Error(DomainMismatch) when x is not in X^(n).
[[nodiscard]] double map_to_numeric(const AttributeDescriptor& d, const Element& x);

/// f_n^{-1}(y) for affine maps on numerical descriptors.
[[nodiscard]] double map_from_numeric(const AttributeDescriptor& d, double y);

/// |f_n(x_j) - f_n(x_i)|, with mapped values rounded to a power-of-two grid
/// 2^-51 of the map range's magnitude so the metric axioms hold exactly in
/// floating point.
[[nodiscard]] double distance(const AttributeDescriptor& d, const Element& xi, const Element& xj);

enum class ConstraintType { None, MutuallyExclusive, Blended };

struct SchemeConstraint {
  ConstraintType type = ConstraintType::None;
  double p = 0.0;  // minor weight, blended only
  double q = 0.0;  // major weight, blended only

  friend bool operator==(const SchemeConstraint&, const SchemeConstraint&) = default;
};

struct Scheme {
  std::string name;
  std::vector<AttributeDescriptor> descriptors;
  SchemeConstraint constraint;

  [[nodiscard]] const AttributeDescriptor* find(std::string_view descriptor_name) const noexcept;
  /// Error(UnknownDescriptor) when missing.
  [[nodiscard]] const AttributeDescriptor& at(std::string_view descriptor_name) const;

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

/// Validates every descriptor plus scheme-level rules (unique names,
/// categorical-only constraints, 0 < p < q with p + q = 1).
ValidationReport validate_scheme(const Scheme& scheme);

/// Euclidean distance between two points whose coordinates are the
/// scheme's numerical descriptors in order. Treats the axes as orthogonal;
/// the assumption is appended to `notes` when provided.
double multi_attribute_distance(const Scheme& scheme, const std::vector<Element>& xi,
                                const std::vector<Element>& xj,
                                std::vector<std::string>* notes = nullptr);

inline constexpr const char* kOrthogonalAxesNote =
    "multi-attribute distance assumes a Euclidean metric over orthogonal descriptor axes";

}  // namespace amber
