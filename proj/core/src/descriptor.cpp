#include "amber/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "amber/error.hpp"
#include "amber/log.hpp"

namespace amber {

std::string_view to_string(DescriptorKind kind) noexcept {
  switch (kind) {
    case DescriptorKind::Categorical: return "categorical";
    case DescriptorKind::Numerical: return "numerical";
    case DescriptorKind::Ordinal: return "ordinal";
  }
  return "?";
}

DescriptorKind descriptor_kind_from_string(std::string_view text) {
  if (text == "categorical") return DescriptorKind::Categorical;
  if (text == "numerical") return DescriptorKind::Numerical;
  if (text == "ordinal") return DescriptorKind::Ordinal;
  throw Error(ErrorCode::FormatError, "unknown descriptor kind '" + std::string(text) + "'");
}

AttributeDescriptor make_categorical(std::string name) {
  return AttributeDescriptor{std::move(name), DescriptorKind::Categorical, {kAbsent, kPresent}, std::nullopt,
                             std::nullopt};
}

AttributeDescriptor make_numerical(std::string name, double alpha, double beta) {
  return make_numerical(std::move(name), alpha, beta, AffineMap{alpha, beta});
}

AttributeDescriptor make_numerical(std::string name, double alpha, double beta, AffineMap map) {
  return AttributeDescriptor{std::move(name), DescriptorKind::Numerical, {}, std::pair{alpha, beta}, map};
}

AttributeDescriptor make_ordinal(std::string name, std::vector<std::string> levels) {
  return AttributeDescriptor{std::move(name), DescriptorKind::Ordinal, std::move(levels), std::nullopt,
                             std::nullopt};
}

AttributeDescriptor attach_numeric_map(const AttributeDescriptor& d, TableMap map) {
  AttributeDescriptor out = d;
  out.numeric_map = std::move(map);
  log::info("attached explicit numeric map to '" + d.name + "' (" + std::string(to_string(d.kind)) +
            "); distances on this descriptor now assume the supplied spacing");
  require_valid(out);
  return out;
}

void ValidationReport::merge(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

namespace {

void check_table(const AttributeDescriptor& d, const TableMap& table, ValidationReport& report) {
  const std::string prefix = "descriptor '" + d.name + "': ";
  if (table.values.size() != d.levels.size()) {
    report.violations.push_back(prefix + "numeric map must assign every level exactly once");
    return;
  }
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    if (table.values[i].first != d.levels[i]) {
      report.violations.push_back(prefix + "numeric map entries must follow level order");
      return;
    }
    if (!std::isfinite(table.values[i].second)) {
      report.violations.push_back(prefix + "numeric map values must be finite");
      return;
    }
    if (i > 0 && !(table.values[i].second > table.values[i - 1].second)) {
      report.violations.push_back(prefix + "numeric map is not strictly increasing");
      return;
    }
  }
}

}  // namespace

ValidationReport validate_descriptor(const AttributeDescriptor& d) {
  ValidationReport report;
  const std::string prefix = "descriptor '" + d.name + "': ";
  if (d.name.empty()) report.violations.push_back("descriptor name is empty");

  std::set<std::string> seen;
  for (const auto& level : d.levels) {
    if (level.empty()) report.violations.push_back(prefix + "empty level name");
    if (!seen.insert(level).second) report.violations.push_back(prefix + "duplicate level '" + level + "'");
  }

  switch (d.kind) {
    case DescriptorKind::Categorical:
      if (d.levels != std::vector<std::string>{kAbsent, kPresent})
        report.violations.push_back(prefix + "categorical descriptor must have exactly the levels [ABSENT, PRESENT]");
      if (d.bounds) report.violations.push_back(prefix + "bounds are only allowed on numerical descriptors");
      break;
    case DescriptorKind::Ordinal:
      if (d.levels.size() < 2) report.violations.push_back(prefix + "fewer than 2 levels");
      if (d.bounds) report.violations.push_back(prefix + "bounds are only allowed on numerical descriptors");
      break;
    case DescriptorKind::Numerical:
      if (!d.levels.empty()) report.violations.push_back(prefix + "numerical descriptor must not list levels");
      if (!d.bounds) {
        report.violations.push_back(prefix + "numerical descriptor requires bounds");
      } else {
        const auto [alpha, beta] = *d.bounds;
        if (!std::isfinite(alpha) || !std::isfinite(beta))
          report.violations.push_back(prefix + "bounds must be finite");
        else if (!(alpha < beta))
          report.violations.push_back(prefix + "alpha does not precede beta");
      }
      if (!d.numeric_map) {
        report.violations.push_back(prefix + "numerical descriptor requires an affine numeric map");
      } else if (const auto* affine = std::get_if<AffineMap>(&*d.numeric_map)) {
        if (!std::isfinite(affine->a) || !std::isfinite(affine->b) || !(affine->a < affine->b))
          report.violations.push_back(prefix + "numeric map target interval must satisfy a < b");
      } else {
        report.violations.push_back(prefix + "numerical descriptor requires an affine numeric map");
      }
      break;
  }

  if (d.kind != DescriptorKind::Numerical && d.numeric_map) {
    if (const auto* table = std::get_if<TableMap>(&*d.numeric_map))
      check_table(d, *table, report);
    else
      report.violations.push_back(prefix + "finite descriptors take a level table, not an affine map");
  }
  return report;
}

void require_valid(const AttributeDescriptor& d) {
  const auto report = validate_descriptor(d);
  if (report.ok()) return;
  std::string msg;
  for (const auto& v : report.violations) msg += (msg.empty() ? "" : "; ") + v;
  throw Error(ErrorCode::InvalidArgument, msg);
}

bool is_finite_kind(const AttributeDescriptor& d) noexcept { return d.kind != DescriptorKind::Numerical; }

bool contains(const AttributeDescriptor& d, const Element& x) {
  if (d.kind == DescriptorKind::Numerical) {
    if (!x.is_value() || !d.bounds) return false;
    const double v = x.as_value();
    return std::isfinite(v) && v >= d.bounds->first - kTolerance && v <= d.bounds->second + kTolerance;
  }
  if (!x.is_level()) return false;
  return std::find(d.levels.begin(), d.levels.end(), x.as_level()) != d.levels.end();
}

std::size_t level_index(const AttributeDescriptor& d, const std::string& level) {
  const auto it = std::find(d.levels.begin(), d.levels.end(), level);
  if (it == d.levels.end())
    throw Error(ErrorCode::DomainMismatch, "'" + level + "' is not a level of descriptor '" + d.name + "'");
  return static_cast<std::size_t>(it - d.levels.begin());
}

bool precedes_or_equal(const AttributeDescriptor& d, const Element& xi, const Element& xj) {
  if (!contains(d, xi) || !contains(d, xj))
    throw Error(ErrorCode::DomainMismatch, "element not in descriptor '" + d.name + "'");
  if (d.kind == DescriptorKind::Numerical) return xi.as_value() <= xj.as_value();
  return level_index(d, xi.as_level()) <= level_index(d, xj.as_level());
}

double map_to_numeric(const AttributeDescriptor& d, const Element& x) {
  if (!d.numeric_map)
    throw Error(ErrorCode::NoNumericStructure,
                "descriptor '" + d.name + "' has no numeric map; distances between its levels are undefined");
  if (!contains(d, x))
    throw Error(ErrorCode::DomainMismatch, x.to_string() + " is not in descriptor '" + d.name + "'");
  if (const auto* affine = std::get_if<AffineMap>(&*d.numeric_map)) {
    const auto [alpha, beta] = *d.bounds;
    const double v = x.as_value();
    if (affine->a == alpha && affine->b == beta) return v;
    return affine->a + (v - alpha) * (affine->b - affine->a) / (beta - alpha);
  }
  const auto& table = std::get<TableMap>(*d.numeric_map);
  return table.values[level_index(d, x.as_level())].second;
}

double map_from_numeric(const AttributeDescriptor& d, double y) {
  if (!d.numeric_map || !std::holds_alternative<AffineMap>(*d.numeric_map) || !d.bounds)
    throw Error(ErrorCode::NoNumericStructure, "descriptor '" + d.name + "' has no invertible affine map");
  const auto& affine = std::get<AffineMap>(*d.numeric_map);
  const auto [alpha, beta] = *d.bounds;
  if (affine.a == alpha && affine.b == beta) return y;
  return alpha + (y - affine.a) * (beta - alpha) / (affine.b - affine.a);
}

namespace {

// Image interval of the numeric map.
std::pair<double, double> map_range(const AttributeDescriptor& d) {
  if (const auto* affine = std::get_if<AffineMap>(&*d.numeric_map)) return {affine->a, affine->b};
  const auto& values = std::get<TableMap>(*d.numeric_map).values;
  double lo = values.front().second, hi = lo;
  for (const auto& [level, v] : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

// Mapped coordinate as an integer multiple of a power-of-two step 2^(E-51),
// where 2^E bounds the map range. Differences and sums of two differences of
// such multiples stay below 2^53 steps and are therefore exact.
std::int64_t grid_coordinate(double v, double lo, double hi, double step) {
  return static_cast<std::int64_t>(std::nearbyint(std::clamp(v, lo, hi) / step));
}

}  // namespace

double distance(const AttributeDescriptor& d, const Element& xi, const Element& xj) {
  const double vi = map_to_numeric(d, xi);
  const double vj = map_to_numeric(d, xj);
  const auto [lo, hi] = map_range(d);
  const double magnitude = std::max(std::fabs(lo), std::fabs(hi));
  if (magnitude == 0.0) return 0.0;
  int exponent = 0;
  std::frexp(magnitude, &exponent);
  const double step = std::ldexp(1.0, exponent - 51);
  const auto ki = grid_coordinate(vi, lo, hi, step);
  const auto kj = grid_coordinate(vj, lo, hi, step);
  return static_cast<double>(ki > kj ? ki - kj : kj - ki) * step;
}

const AttributeDescriptor* Scheme::find(std::string_view descriptor_name) const noexcept {
  for (const auto& d : descriptors)
    if (d.name == descriptor_name) return &d;
  return nullptr;
}

const AttributeDescriptor& Scheme::at(std::string_view descriptor_name) const {
  if (const auto* d = find(descriptor_name)) return *d;
  throw Error(ErrorCode::UnknownDescriptor,
              "scheme '" + name + "' has no descriptor '" + std::string(descriptor_name) + "'");
}

ValidationReport validate_scheme(const Scheme& scheme) {
  ValidationReport report;
  if (scheme.name.empty()) report.violations.push_back("scheme name is empty");
  if (scheme.descriptors.empty()) report.violations.push_back("scheme has no descriptors");
  std::set<std::string> names;
  bool all_categorical = true;
  for (const auto& d : scheme.descriptors) {
    report.merge(validate_descriptor(d));
    if (!names.insert(d.name).second) report.violations.push_back("duplicate descriptor name '" + d.name + "'");
    all_categorical = all_categorical && d.kind == DescriptorKind::Categorical;
  }
  const auto& c = scheme.constraint;
  if (c.type != ConstraintType::None && !all_categorical)
    report.violations.push_back("mutually_exclusive and blended constraints require all descriptors categorical");
  if (c.type == ConstraintType::Blended) {
    if (!(c.p > 0.0 && c.p < c.q)) report.violations.push_back("blended constraint requires 0 < p < q");
    if (std::fabs(c.p + c.q - 1.0) > kTolerance) report.violations.push_back("blended constraint requires p + q = 1");
    if (scheme.descriptors.size() < 2) report.violations.push_back("blended constraint needs at least 2 categories");
  }
  return report;
}

double multi_attribute_distance(const Scheme& scheme, const std::vector<Element>& xi,
                                const std::vector<Element>& xj, std::vector<std::string>* notes) {
  std::vector<const AttributeDescriptor*> axes;
  for (const auto& d : scheme.descriptors)
    if (d.kind == DescriptorKind::Numerical) axes.push_back(&d);
  if (xi.size() != axes.size() || xj.size() != axes.size())
    throw Error(ErrorCode::SizeMismatch, "points must have one coordinate per numerical descriptor");
  double sum = 0.0;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const double delta = distance(*axes[k], xi[k], xj[k]);
    sum += delta * delta;
  }
  if (notes) notes->emplace_back(kOrthogonalAxesNote);
  return std::sqrt(sum);
}

}  // namespace amber
