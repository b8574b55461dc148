#include "amber/representation.hpp"

#include <cmath>
#include <set>

#include "amber/error.hpp"

namespace amber {

namespace {

bool same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::fabs(a[i] - b[i]) > kTolerance) return false;
  return true;
}

std::string time_label(const std::vector<double>& grid, std::size_t t) {
  return grid.empty() ? std::string("constant label") : "t=" + Element::value(grid[t]).to_string();
}

void check_exclusive(const std::vector<std::pair<std::string, double>>& weights, const std::string& where,
                     ValidationReport& report) {
  std::size_t present = 0;
  for (const auto& [name, w] : weights) {
    if (w > kTolerance && w < 1.0 - kTolerance)
      report.violations.push_back(where + ": '" + name + "' has ambiguous presence under mutually exclusive scheme");
    if (w >= 1.0 - kTolerance) ++present;
  }
  if (present > 1)
    report.violations.push_back(where + ": " + std::to_string(present) +
                                " categories PRESENT under mutually exclusive scheme");
  if (present == 0) report.warnings.push_back(where + ": no category PRESENT (neutral label)");
}

void check_blended(const std::vector<std::pair<std::string, double>>& weights, const SchemeConstraint& c,
                   const std::string& where, ValidationReport& report) {
  double sum = 0.0;
  std::size_t nonzero = 0;
  std::size_t majors = 0;
  std::size_t minors = 0;
  for (const auto& [name, w] : weights) {
    sum += w;
    if (w > 0.0) {
      ++nonzero;
      if (std::fabs(w - c.q) <= kTolerance)
        ++majors;
      else if (std::fabs(w - c.p) <= kTolerance)
        ++minors;
      else
        report.violations.push_back(where + ": weight of '" + name + "' is neither p nor q");
    }
  }
  if (std::fabs(sum - 1.0) > kTolerance)
    report.violations.push_back(where + ": presence weights sum to " + Element::value(sum).to_string() + ", not 1");
  if (nonzero != 2)
    report.violations.push_back(where + ": " + std::to_string(nonzero) + " categories present, blended needs exactly 2");
  else if (majors != 1 || minors != 1)
    report.violations.push_back(where + ": blended label needs one major (q) and one minor (p) category");
}

}  // namespace

std::vector<double> time_grid(const EmotionRepresentation& rep) {
  std::vector<double> grid;
  bool seen = false;
  for (const auto& [name, entry] : rep.per_descriptor) {
    const auto* series = std::get_if<TimeVaryingAmbiguity>(&entry);
    if (series == nullptr) continue;
    if (!seen) {
      grid = series->times;
      seen = true;
    } else if (!same_grid(grid, series->times)) {
      throw Error(ErrorCode::GridMismatch, "descriptor '" + name + "' uses a different timestamp grid");
    }
  }
  return grid;
}

const AmbiguityFunction& function_at(const DescriptorEntry& entry, std::size_t t) {
  if (const auto* constant = std::get_if<AmbiguityFunction>(&entry)) return *constant;
  const auto& series = std::get<TimeVaryingAmbiguity>(entry);
  if (t >= series.functions.size()) throw Error(ErrorCode::IndexOutOfRange, "time index out of range");
  return series.functions[t];
}

ValidationReport check_scheme_constraints(const EmotionRepresentation& rep, const Scheme& scheme) {
  if (rep.scheme_ref != scheme.name)
    throw Error(ErrorCode::SchemeMismatch,
                "representation references scheme '" + rep.scheme_ref + "', got '" + scheme.name + "'");
  std::set<std::string> expected;
  for (const auto& d : scheme.descriptors) expected.insert(d.name);
  std::set<std::string> actual;
  for (const auto& [name, entry] : rep.per_descriptor) actual.insert(name);
  if (expected != actual)
    throw Error(ErrorCode::SchemeMismatch, "representation descriptors differ from scheme '" + scheme.name + "'");

  ValidationReport report = validate_scheme(scheme);
  std::vector<double> grid;
  try {
    grid = time_grid(rep);
  } catch (const Error& e) {
    report.violations.emplace_back(e.what());
    return report;
  }

  bool structurally_valid = true;
  for (const auto& d : scheme.descriptors) {
    const auto& entry = rep.per_descriptor.at(d.name);
    ValidationReport entry_report = std::holds_alternative<AmbiguityFunction>(entry)
                                        ? validate_ambiguity(std::get<AmbiguityFunction>(entry), d)
                                        : validate_time_varying(std::get<TimeVaryingAmbiguity>(entry), d);
    structurally_valid = structurally_valid && entry_report.ok();
    report.merge(entry_report);
  }

  const auto& c = scheme.constraint;
  if (c.type == ConstraintType::None || !structurally_valid) return report;

  // Categorical constraints imply labels constant over the interval.
  for (const auto& d : scheme.descriptors) {
    const auto* series = std::get_if<TimeVaryingAmbiguity>(&rep.per_descriptor.at(d.name));
    if (series == nullptr) continue;
    for (std::size_t t = 1; t < series->functions.size(); ++t) {
      if (!(series->functions[t] == series->functions.front())) {
        report.violations.push_back("'" + d.name + "' varies within the interval of interest");
        break;
      }
    }
  }

  const std::size_t steps = grid.empty() ? 1 : grid.size();
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<std::pair<std::string, double>> weights;
    for (const auto& d : scheme.descriptors) {
      if (d.kind != DescriptorKind::Categorical) continue;
      weights.emplace_back(d.name, presence_weight(function_at(rep.per_descriptor.at(d.name), t), d));
    }
    const std::string where = time_label(grid, t);
    if (c.type == ConstraintType::MutuallyExclusive)
      check_exclusive(weights, where, report);
    else
      check_blended(weights, c, where, report);
  }
  return report;
}

EmotionRepresentation make_blended(const std::string& major, const std::string& minor, double q, double p,
                                   const Scheme& scheme) {
  if (major == minor) throw Error(ErrorCode::MajorEqualsMinor, "major and minor category are both '" + major + "'");
  if (!(p > 0.0 && p < q) || std::fabs(p + q - 1.0) > kTolerance)
    throw Error(ErrorCode::InvalidWeights, "blended weights need 0 < p < q and p + q = 1");
  const auto& major_d = scheme.at(major);
  const auto& minor_d = scheme.at(minor);
  if (major_d.kind != DescriptorKind::Categorical || minor_d.kind != DescriptorKind::Categorical)
    throw Error(ErrorCode::UnknownDescriptor, "major and minor must name categorical descriptors");

  EmotionRepresentation rep{scheme.name, {}};
  for (const auto& d : scheme.descriptors) {
    if (d.kind != DescriptorKind::Categorical)
      throw Error(ErrorCode::SchemeMismatch, "blended labels need an all-categorical scheme; '" + d.name + "' is not");
    if (d.name == major)
      rep.per_descriptor.emplace(d.name, presence(d, q));
    else if (d.name == minor)
      rep.per_descriptor.emplace(d.name, presence(d, p));
    else
      rep.per_descriptor.emplace(d.name, from_point_label(d, Element::level(kAbsent)));
  }
  return rep;
}

SingleValued to_single_valued(const EmotionRepresentation& rep, const Scheme& scheme, SingleValuePolicy policy) {
  if (rep.scheme_ref != scheme.name)
    throw Error(ErrorCode::SchemeMismatch, "representation does not reference scheme '" + scheme.name + "'");
  SingleValued out;
  out.times = time_grid(rep);
  for (const auto& [name, entry] : rep.per_descriptor) {
    const auto& d = scheme.at(name);
    if (policy == SingleValuePolicy::Mean && d.kind != DescriptorKind::Numerical)
      throw Error(ErrorCode::PolicyUnsupported,
                  "mean policy on " + std::string(to_string(d.kind)) + " descriptor '" + name + "'");
    const std::size_t steps = std::holds_alternative<AmbiguityFunction>(entry)
                                  ? 1
                                  : std::get<TimeVaryingAmbiguity>(entry).functions.size();
    auto& values = out.values[name];
    values.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      const auto& xi = function_at(entry, t);
      values.push_back(policy == SingleValuePolicy::Mode ? argmax_label(xi, d).element
                                                         : Element::value(mean_value(xi, d)));
    }
  }
  return out;
}

CentroidResult categorical_centroids(const std::vector<CategoryPoint>& points, const Scheme& scheme) {
  std::vector<const AttributeDescriptor*> axes;
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums;
  for (const auto& d : scheme.descriptors) {
    if (d.kind == DescriptorKind::Numerical) {
      if (!d.numeric_map) throw Error(ErrorCode::NoNumericStructure, "axis '" + d.name + "' has no numeric map");
      axes.push_back(&d);
    } else if (d.kind == DescriptorKind::Categorical) {
      sums[d.name] = {{}, 0};
    }
  }
  if (axes.empty()) throw Error(ErrorCode::InvalidArgument, "scheme has no numerical axes");
  if (sums.empty()) throw Error(ErrorCode::InvalidArgument, "scheme has no categorical descriptors");
  for (auto& [name, acc] : sums) acc.first.assign(axes.size(), 0.0);

  for (const auto& point : points) {
    const auto it = sums.find(point.category);
    if (it == sums.end())
      throw Error(ErrorCode::UnknownDescriptor, "'" + point.category + "' is not a category of the scheme");
    if (point.coordinates.size() != axes.size())
      throw Error(ErrorCode::SizeMismatch, "points need one coordinate per numerical descriptor");
    for (std::size_t k = 0; k < axes.size(); ++k) it->second.first[k] += point.coordinates[k];
    ++it->second.second;
  }

  CentroidResult result;
  for (auto& [name, acc] : sums) {
    if (acc.second == 0) throw Error(ErrorCode::EmptyCategory, "category '" + name + "' has no points");
    for (double& v : acc.first) v /= static_cast<double>(acc.second);
    result.centroids.emplace(name, std::move(acc.first));
  }
  result.assumptions.emplace_back(kOrthogonalAxesNote);
  result.assumptions.emplace_back("category centroid is the arithmetic mean of its points in mapped coordinates");
  return result;
}

}  // namespace amber
