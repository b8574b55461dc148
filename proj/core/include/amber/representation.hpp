#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "amber/ambiguity.hpp"
#include "amber/descriptor.hpp"

namespace amber {

/// Either one function held constant over the interval of interest or a
/// time-indexed series.
using DescriptorEntry = std::variant<AmbiguityFunction, TimeVaryingAmbiguity>;

/// Psi(t): one entry per scheme descriptor.
struct EmotionRepresentation {
  std::string scheme_ref;
  std::map<std::string, DescriptorEntry> per_descriptor;

  friend bool operator==(const EmotionRepresentation&, const EmotionRepresentation&) = default;
};

/// Shared timestamp grid of the time-varying entries; empty when every entry
/// is constant. Error(GridMismatch) when series disagree.
std::vector<double> time_grid(const EmotionRepresentation& rep);

/// Function of one entry at grid index `t` (constant entries ignore `t`).
const AmbiguityFunction& function_at(const DescriptorEntry& entry, std::size_t t);

/// Structural checks (one entry per descriptor, shared grid, family
/// compatibility) plus the scheme's constraint rules. Error(SchemeMismatch)
/// when the representation's descriptor set differs from the scheme's.
ValidationReport check_scheme_constraints(const EmotionRepresentation& rep, const Scheme& scheme);

/// Blended representation: xi_major(PRESENT) = q, xi_minor(PRESENT) = p and
/// every other category ABSENT.
EmotionRepresentation make_blended(const std::string& major, const std::string& minor, double q, double p,
                                   const Scheme& scheme);

enum class SingleValuePolicy { Mode, Mean };

/// Single-valued labels; one element per timestamp, or exactly one element
/// for constant entries.
struct SingleValued {
  std::vector<double> times;
  std::map<std::string, std::vector<Element>> values;
};

SingleValued to_single_valued(const EmotionRepresentation& rep, const Scheme& scheme, SingleValuePolicy policy);

struct CategoryPoint {
  std::string category;
  std::vector<double> coordinates;
};

struct CentroidResult {
  std::map<std::string, std::vector<double>> centroids;
  std::vector<std::string> assumptions;
};

/// Arithmetic mean of each category's points in the space spanned by the
/// scheme's numerical descriptors. Every categorical descriptor of the
/// scheme needs at least one point.
CentroidResult categorical_centroids(const std::vector<CategoryPoint>& points, const Scheme& scheme);

}  // namespace amber
