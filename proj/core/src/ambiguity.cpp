#include "amber/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amber/error.hpp"

namespace amber {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_categorical(const AttributeDescriptor& d) noexcept { return d.kind == DescriptorKind::Categorical; }

void require_descriptor(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  if (xi.descriptor_ref != d.name)
    throw Error(ErrorCode::DomainMismatch,
                "function is defined over '" + xi.descriptor_ref + "', not '" + d.name + "'");
}

std::pair<double, double> mapped_bounds(const AttributeDescriptor& d) {
  const auto& affine = std::get<AffineMap>(*d.numeric_map);
  return {affine.a, affine.b};
}

double normal_cdf(double x, double mean, double sd) noexcept {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double mixture_density(const GaussianMixture& gmm, double y) noexcept {
  double sum = 0.0;
  for (const auto& c : gmm.components) sum += c.weight * normal_pdf(y, c.mean, c.sd);
  return sum;
}

// Stationary point of the mixture density reached from `start` by the
// fixed-point iteration x <- sum r_k mu_k / s_k^2 / sum r_k / s_k^2.
double climb_to_mode(const GaussianMixture& gmm, double start) {
  double x = start;
  for (int iter = 0; iter < 10000; ++iter) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& c : gmm.components) {
      const double r = c.weight * normal_pdf(x, c.mean, c.sd) / (c.sd * c.sd);
      num += r * c.mean;
      den += r;
    }
    if (!(den > 0.0)) return x;
    const double next = num / den;
    if (std::fabs(next - x) < 1e-14) return next;
    x = next;
  }
  return x;
}

}  // namespace

std::string_view variant_name(const AmbiguityFunction& xi) noexcept {
  return std::visit(Overloaded{
                        [](const PointMass&) { return std::string_view("point_mass"); },
                        [](const FiniteSupport&) { return std::string_view("finite_support"); },
                        [](const Gaussian&) { return std::string_view("gaussian"); },
                        [](const GaussianMixture&) { return std::string_view("gaussian_mixture"); },
                        [](const BernoulliPair&) { return std::string_view("bernoulli_pair"); },
                    },
                    xi.variant);
}

AttributeDescriptor make_comparison_descriptor(std::string name) {
  return make_ordinal(std::move(name), {kLower, kHigher});
}

bool is_comparison_descriptor(const AttributeDescriptor& d) noexcept {
  return d.kind == DescriptorKind::Ordinal && d.levels == std::vector<std::string>{kLower, kHigher};
}

double normal_pdf(double x, double mean, double sd) noexcept {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

ValidationReport validate_ambiguity(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  ValidationReport report;
  const std::string prefix = "function over '" + xi.descriptor_ref + "': ";
  if (xi.descriptor_ref != d.name) {
    report.violations.push_back(prefix + "descriptor reference does not match '" + d.name + "'");
    return report;
  }
  const bool numerical = d.kind == DescriptorKind::Numerical;
  std::visit(
      Overloaded{
          [&](const PointMass& pm) {
            if (!contains(d, pm.element))
              report.violations.push_back(prefix + "point mass at " + pm.element.to_string() + " outside the space");
          },
          [&](const FiniteSupport& fs) {
            if (fs.weights.empty()) report.violations.push_back(prefix + "finite support is empty");
            for (std::size_t i = 0; i < fs.weights.size(); ++i) {
              const auto& [x, w] = fs.weights[i];
              if (!contains(d, x)) {
                report.violations.push_back(prefix + "support element " + x.to_string() + " outside the space");
                return;
              }
              if (!std::isfinite(w) || w < 0.0) report.violations.push_back(prefix + "negative or non-finite weight");
              if (i > 0 && !precedes_or_equal(d, fs.weights[i - 1].first, x))
                report.violations.push_back(prefix + "support must follow descriptor order");
              if (i > 0 && fs.weights[i - 1].first == x) report.violations.push_back(prefix + "duplicate support element");
            }
            if (is_categorical(d)) {
              if (fs.weights.size() != 1 || fs.weights.front().first != Element::level(kPresent))
                report.violations.push_back(prefix + "categorical functions store only the PRESENT weight");
              else if (fs.weights.front().second > 1.0 + kTolerance)
                report.violations.push_back(prefix + "categorical presence weight exceeds 1");
            }
          },
          [&](const Gaussian& g) {
            if (!numerical) report.violations.push_back(prefix + "gaussian requires a numerical descriptor");
            if (!std::isfinite(g.mean) || !std::isfinite(g.sd) || !(g.sd > 0.0))
              report.violations.push_back(prefix + "gaussian requires finite mean and sd > 0");
          },
          [&](const GaussianMixture& gmm) {
            if (!numerical) report.violations.push_back(prefix + "gaussian mixture requires a numerical descriptor");
            if (gmm.components.empty()) report.violations.push_back(prefix + "gaussian mixture has no components");
            double total = 0.0;
            for (const auto& c : gmm.components) {
              if (!std::isfinite(c.weight) || c.weight < 0.0)
                report.violations.push_back(prefix + "mixture weight negative or non-finite");
              if (!std::isfinite(c.mean) || !std::isfinite(c.sd) || !(c.sd > 0.0))
                report.violations.push_back(prefix + "mixture component requires finite mean and sd > 0");
              total += c.weight;
            }
            if (std::fabs(total - 1.0) > kTolerance)
              report.violations.push_back(prefix + "mixture weights do not sum to 1");
          },
          [&](const BernoulliPair& b) {
            if (!is_comparison_descriptor(d))
              report.violations.push_back(prefix + "bernoulli pair requires a two-outcome comparison descriptor");
            if (!(b.p_first >= 0.0 && b.p_first <= 1.0))
              report.violations.push_back(prefix + "bernoulli probability outside [0, 1]");
          },
      },
      xi.variant);

  if (report.ok() && numerical && d.numeric_map) {
    const double outside = mass_outside_bounds(xi, d);
    if (outside > kOutsideMassWarning)
      report.warnings.push_back(prefix + std::to_string(outside * 100.0) + "% of the density lies outside the bounds");
  }
  return report;
}

void require_valid(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  const auto report = validate_ambiguity(xi, d);
  if (report.ok()) return;
  throw Error(xi.descriptor_ref != d.name ? ErrorCode::DomainMismatch : ErrorCode::InvalidArgument,
              report.violations.front());
}

double evaluate_mapped(const AmbiguityFunction& xi, double y) {
  if (const auto* g = std::get_if<Gaussian>(&xi.variant)) return normal_pdf(y, g->mean, g->sd);
  if (const auto* gmm = std::get_if<GaussianMixture>(&xi.variant)) return mixture_density(*gmm, y);
  throw Error(ErrorCode::UnsupportedPair, "evaluate_mapped needs a density variant");
}

double evaluate(const AmbiguityFunction& xi, const AttributeDescriptor& d, const Element& x) {
  require_descriptor(xi, d);
  if (!contains(d, x))
    throw Error(ErrorCode::DomainMismatch, x.to_string() + " is not in descriptor '" + d.name + "'");
  return std::visit(Overloaded{
                        [&](const PointMass& pm) { return pm.element == x ? 1.0 : 0.0; },
                        [&](const FiniteSupport& fs) {
                          if (is_categorical(d)) {
                            const double w = fs.weights.empty() ? 0.0 : fs.weights.front().second;
                            return x.as_level() == kPresent ? w : 1.0 - w;
                          }
                          for (const auto& [e, w] : fs.weights)
                            if (e == x) return w;
                          return 0.0;
                        },
                        [&](const Gaussian& g) { return normal_pdf(map_to_numeric(d, x), g.mean, g.sd); },
                        [&](const GaussianMixture& gmm) { return mixture_density(gmm, map_to_numeric(d, x)); },
                        [&](const BernoulliPair& b) { return x.as_level() == kHigher ? b.p_first : 1.0 - b.p_first; },
                    },
                    xi.variant);
}

double total_mass(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  require_descriptor(xi, d);
  if (const auto* fs = std::get_if<FiniteSupport>(&xi.variant)) {
    if (is_categorical(d)) return 1.0;
    double sum = 0.0;
    for (const auto& [e, w] : fs->weights) sum += w;
    return sum;
  }
  return 1.0;
}

AmbiguityFunction normalize(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  require_descriptor(xi, d);
  const auto* fs = std::get_if<FiniteSupport>(&xi.variant);
  if (fs == nullptr || is_categorical(d)) return xi;
  const double sum = total_mass(xi, d);
  if (!(sum > 0.0)) throw Error(ErrorCode::ZeroMass, "all weights over '" + d.name + "' are zero");
  if (std::fabs(sum - 1.0) <= 1e-12) return xi;
  FiniteSupport out = *fs;
  for (auto& [e, w] : out.weights) w /= sum;
  return AmbiguityFunction{std::move(out), xi.descriptor_ref};
}

std::vector<std::pair<Element, double>> finite_masses(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  require_descriptor(xi, d);
  std::vector<std::pair<Element, double>> out;
  if (is_finite_kind(d)) {
    out.reserve(d.levels.size());
    for (const auto& level : d.levels) {
      const Element x = Element::level(level);
      if (std::holds_alternative<Gaussian>(xi.variant) || std::holds_alternative<GaussianMixture>(xi.variant))
        throw Error(ErrorCode::UnsupportedPair, "density over a finite descriptor");
      out.emplace_back(x, evaluate(xi, d, x));
    }
    return out;
  }
  if (const auto* pm = std::get_if<PointMass>(&xi.variant)) {
    out.emplace_back(pm->element, 1.0);
    return out;
  }
  if (const auto* fs = std::get_if<FiniteSupport>(&xi.variant)) return fs->weights;
  throw Error(ErrorCode::UnsupportedPair, "'" + std::string(variant_name(xi)) + "' has no finite support");
}

ArgmaxResult argmax_label(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  require_descriptor(xi, d);
  if (const auto* pm = std::get_if<PointMass>(&xi.variant)) return {pm->element, false};
  if (const auto* g = std::get_if<Gaussian>(&xi.variant)) return {Element::value(map_from_numeric(d, g->mean)), false};
  if (const auto* b = std::get_if<BernoulliPair>(&xi.variant)) {
    if (b->p_first > 0.5 + kTolerance) return {Element::level(kHigher), false};
    if (b->p_first < 0.5 - kTolerance) return {Element::level(kLower), false};
    return {Element::level(kLower), true};
  }
  if (const auto* gmm = std::get_if<GaussianMixture>(&xi.variant)) {
    std::vector<std::pair<double, double>> modes;  // (location, density)
    for (const auto& c : gmm->components) {
      const double m = climb_to_mode(*gmm, c.mean);
      const bool known = std::any_of(modes.begin(), modes.end(),
                                     [&](const auto& other) { return std::fabs(other.first - m) < 1e-6; });
      if (!known) modes.emplace_back(m, mixture_density(*gmm, m));
    }
    std::sort(modes.begin(), modes.end());
    double best = 0.0;
    for (const auto& [m, f] : modes) best = std::max(best, f);
    std::size_t count = 0;
    double chosen = 0.0;
    for (const auto& [m, f] : modes) {
      if (best - f <= kTolerance) {
        if (count == 0) chosen = m;
        ++count;
      }
    }
    return {Element::value(map_from_numeric(d, chosen)), count > 1};
  }

  const auto masses = finite_masses(xi, d);
  double best = -1.0;
  for (const auto& [e, w] : masses) best = std::max(best, w);
  std::size_t count = 0;
  Element chosen;
  for (const auto& [e, w] : masses) {
    if (best - w <= kTolerance) {
      if (count == 0) chosen = e;
      ++count;
    }
  }
  return {chosen, count > 1};
}

AmbiguityFunction from_point_label(const AttributeDescriptor& d, const Element& x) {
  if (!contains(d, x))
    throw Error(ErrorCode::DomainMismatch, x.to_string() + " is not in descriptor '" + d.name + "'");
  return AmbiguityFunction{PointMass{x}, d.name};
}

AmbiguityFunction presence(const AttributeDescriptor& d, double weight_present) {
  if (!is_categorical(d))
    throw Error(ErrorCode::DomainMismatch, "presence weights need a categorical descriptor, '" + d.name + "' is not");
  if (!(weight_present >= 0.0 && weight_present <= 1.0))
    throw Error(ErrorCode::InvalidWeights, "presence weight must lie in [0, 1]");
  return AmbiguityFunction{FiniteSupport{{{Element::level(kPresent), weight_present}}}, d.name};
}

double presence_weight(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  if (!is_categorical(d))
    throw Error(ErrorCode::DomainMismatch, "'" + d.name + "' is not categorical");
  return evaluate(xi, d, Element::level(kPresent));
}

double mean_value(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  require_descriptor(xi, d);
  if (d.kind != DescriptorKind::Numerical)
    throw Error(ErrorCode::PolicyUnsupported, "mean is undefined on " + std::string(to_string(d.kind)) +
                                                  " descriptor '" + d.name + "'");
  return std::visit(Overloaded{
                        [&](const PointMass& pm) { return pm.element.as_value(); },
                        [&](const FiniteSupport& fs) {
                          double num = 0.0;
                          double den = 0.0;
                          for (const auto& [e, w] : fs.weights) {
                            num += w * map_to_numeric(d, e);
                            den += w;
                          }
                          if (!(den > 0.0)) throw Error(ErrorCode::ZeroMass, "all weights are zero");
                          return map_from_numeric(d, num / den);
                        },
                        [&](const Gaussian& g) { return map_from_numeric(d, g.mean); },
                        [&](const GaussianMixture& gmm) {
                          double m = 0.0;
                          for (const auto& c : gmm.components) m += c.weight * c.mean;
                          return map_from_numeric(d, m);
                        },
                        [&](const BernoulliPair&) -> double {
                          throw Error(ErrorCode::PolicyUnsupported, "mean of a comparison outcome");
                        },
                    },
                    xi.variant);
}

double mass_outside_bounds(const AmbiguityFunction& xi, const AttributeDescriptor& d) {
  if (d.kind != DescriptorKind::Numerical || !d.numeric_map) return 0.0;
  const auto [a, b] = mapped_bounds(d);
  if (const auto* g = std::get_if<Gaussian>(&xi.variant))
    return 1.0 - (normal_cdf(b, g->mean, g->sd) - normal_cdf(a, g->mean, g->sd));
  if (const auto* gmm = std::get_if<GaussianMixture>(&xi.variant)) {
    double inside = 0.0;
    for (const auto& c : gmm->components) inside += c.weight * (normal_cdf(b, c.mean, c.sd) - normal_cdf(a, c.mean, c.sd));
    return std::max(0.0, 1.0 - inside);
  }
  return 0.0;
}

ValidationReport validate_time_varying(const TimeVaryingAmbiguity& series, const AttributeDescriptor& d) {
  ValidationReport report;
  if (series.times.size() != series.functions.size()) {
    report.violations.push_back("time-varying function over '" + d.name + "' has mismatched times/functions");
    return report;
  }
  if (series.times.empty()) report.violations.push_back("time-varying function over '" + d.name + "' is empty");
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (!std::isfinite(series.times[i]))
      report.violations.push_back("non-finite timestamp over '" + d.name + "'");
    if (i > 0 && !(series.times[i] > series.times[i - 1]))
      report.violations.push_back("timestamps over '" + d.name + "' are not strictly increasing");
    report.merge(validate_ambiguity(series.functions[i], d));
  }
  return report;
}

}  // namespace amber
