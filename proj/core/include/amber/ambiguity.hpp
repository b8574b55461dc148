#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "amber/descriptor.hpp"
#include "amber/element.hpp"

namespace amber {

/// Indicator of a single element: the zero-ambiguity case.
struct PointMass {
  Element element;
  friend bool operator==(const PointMass&, const PointMass&) = default;
};

/// Non-negative weights on finitely many elements, kept in descriptor order.
/// Over a categorical descriptor only the PRESENT weight is stored and
/// xi(ABSENT) = 1 - xi(PRESENT) is derived.
struct FiniteSupport {
  std::vector<std::pair<Element, double>> weights;
  friend bool operator==(const FiniteSupport&, const FiniteSupport&) = default;
};

struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

struct MixtureComponent {
  double weight = 1.0;
  double mean = 0.0;
  double sd = 1.0;
  friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

struct GaussianMixture {
  std::vector<MixtureComponent> components;
  friend bool operator==(const GaussianMixture&, const GaussianMixture&) = default;
};

/// Distribution over a two-outcome comparison; p_first is the probability of
/// the first outcome (HIGHER on a pairwise comparison descriptor).
struct BernoulliPair {
  double p_first = 0.5;
  friend bool operator==(const BernoulliPair&, const BernoulliPair&) = default;
};

using AmbiguityVariant = std::variant<PointMass, FiniteSupport, Gaussian, GaussianMixture, BernoulliPair>;

/// xi_{n,t}: maps elements of one descriptor to [0, inf). Gaussian parameters
/// live in the descriptor's mapped coordinate f_n(x).
struct AmbiguityFunction {
  AmbiguityVariant variant;
  std::string descriptor_ref;

  friend bool operator==(const AmbiguityFunction&, const AmbiguityFunction&) = default;
};

std::string_view variant_name(const AmbiguityFunction& xi) noexcept;

/// Levels of the built-in two-outcome comparison descriptor, low to high.
inline constexpr const char* kLower = "LOWER";
inline constexpr const char* kHigher = "HIGHER";
AttributeDescriptor make_comparison_descriptor(std::string name);
[[nodiscard]] bool is_comparison_descriptor(const AttributeDescriptor& d) noexcept;

/// Family/descriptor compatibility and parameter invariants.
ValidationReport validate_ambiguity(const AmbiguityFunction& xi, const AttributeDescriptor& d);
/// Throws Error(DomainMismatch or InvalidArgument) when validate_ambiguity fails.
void require_valid(const AmbiguityFunction& xi, const AttributeDescriptor& d);

[[nodiscard]] double normal_pdf(double x, double mean, double sd) noexcept;

/// xi(x). Error(DomainMismatch) if x is outside the descriptor's space.
[[nodiscard]] double evaluate(const AmbiguityFunction& xi, const AttributeDescriptor& d, const Element& x);

/// Density (or mass) at a mapped coordinate. Only for numerical descriptors.
[[nodiscard]] double evaluate_mapped(const AmbiguityFunction& xi, double y);

/// Total mass. Density variants report 1.
[[nodiscard]] double total_mass(const AmbiguityFunction& xi, const AttributeDescriptor& d);

/// FiniteSupport weights rescaled to sum to 1; other variants unchanged.
/// Error(ZeroMass) when all weights are 0.
[[nodiscard]] AmbiguityFunction normalize(const AmbiguityFunction& xi, const AttributeDescriptor& d);

struct ArgmaxResult {
  Element element;
  bool tie = false;
};

/// Element with maximal xi. Ties within kTolerance resolve to the lowest
/// element in descriptor order and set `tie`. Mixture modes are located by
/// fixed-point iteration from each component mean.
[[nodiscard]] ArgmaxResult argmax_label(const AmbiguityFunction& xi, const AttributeDescriptor& d);

/// PointMass(x). Error(DomainMismatch) if x is not in X^(n).
[[nodiscard]] AmbiguityFunction from_point_label(const AttributeDescriptor& d, const Element& x);

/// Convenience constructor for a categorical presence weight in [0, 1].
[[nodiscard]] AmbiguityFunction presence(const AttributeDescriptor& d, double weight_present);

/// xi(PRESENT) of a categorical function.
[[nodiscard]] double presence_weight(const AmbiguityFunction& xi, const AttributeDescriptor& d);

/// Expected value under the normalized function, in element coordinates.
/// Numerical descriptors only.
[[nodiscard]] double mean_value(const AmbiguityFunction& xi, const AttributeDescriptor& d);

/// Probability mass of a density lying outside the mapped bounds [a, b].
/// Finite variants report 0.
[[nodiscard]] double mass_outside_bounds(const AmbiguityFunction& xi, const AttributeDescriptor& d);

inline constexpr double kOutsideMassWarning = 0.05;

/// The element-wise distribution of a finite-support-like function over an
/// explicit, ordered support (categorical complement expanded). Not
/// normalized. Error(UnsupportedPair) for densities.
[[nodiscard]] std::vector<std::pair<Element, double>> finite_masses(const AmbiguityFunction& xi,
                                                                    const AttributeDescriptor& d);

struct TimeVaryingAmbiguity {
  std::vector<double> times;
  std::vector<AmbiguityFunction> functions;

  friend bool operator==(const TimeVaryingAmbiguity&, const TimeVaryingAmbiguity&) = default;
};

ValidationReport validate_time_varying(const TimeVaryingAmbiguity& series, const AttributeDescriptor& d);

}  // namespace amber
