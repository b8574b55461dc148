#include "amber/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "amber/error.hpp"

namespace amber {

std::string_view to_string(DivergenceMethod method) noexcept {
  return method == DivergenceMethod::KullbackLeibler ? "kl" : "tv";
}

DivergenceMethod divergence_method_from_string(std::string_view text) {
  if (text == "kl") return DivergenceMethod::KullbackLeibler;
  if (text == "tv") return DivergenceMethod::TotalVariation;
  throw Error(ErrorCode::InvalidArgument, "unknown divergence method '" + std::string(text) + "'");
}

namespace {

bool is_density(const AmbiguityFunction& xi) noexcept {
  return std::holds_alternative<Gaussian>(xi.variant) || std::holds_alternative<GaussianMixture>(xi.variant);
}

void require_same_descriptor(const AmbiguityFunction& p, const AmbiguityFunction& q, const AttributeDescriptor& d) {
  if (p.descriptor_ref != q.descriptor_ref || p.descriptor_ref != d.name)
    throw Error(ErrorCode::DescriptorMismatch, "cannot compare functions over '" + p.descriptor_ref + "' and '" +
                                                   q.descriptor_ref + "' using descriptor '" + d.name + "'");
  require_valid(p, d);
  require_valid(q, d);
}

// Aligned, normalized probability vectors over the union support.
std::pair<std::vector<double>, std::vector<double>> aligned_masses(const AmbiguityFunction& p,
                                                                   const AmbiguityFunction& q,
                                                                   const AttributeDescriptor& d) {
  auto normalized = [&](const AmbiguityFunction& xi) {
    auto masses = finite_masses(xi, d);
    double total = 0.0;
    for (const auto& [e, w] : masses) total += w;
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "function over '" + d.name + "' has zero mass");
    for (auto& [e, w] : masses) w /= total;
    return masses;
  };
  const auto pm = normalized(p);
  const auto qm = normalized(q);
  if (is_finite_kind(d)) {
    std::vector<double> pv;
    std::vector<double> qv;
    for (std::size_t k = 0; k < pm.size(); ++k) {
      pv.push_back(pm[k].second);
      qv.push_back(qm[k].second);
    }
    return {pv, qv};
  }
  std::map<double, std::pair<double, double>> merged;
  for (const auto& [e, w] : pm) merged[e.as_value()].first += w;
  for (const auto& [e, w] : qm) merged[e.as_value()].second += w;
  std::vector<double> pv;
  std::vector<double> qv;
  for (const auto& [x, pq] : merged) {
    pv.push_back(pq.first);
    qv.push_back(pq.second);
  }
  return {pv, qv};
}

// Atoms become narrow Gaussian components; densities pass through.
GaussianMixture as_mixture(const AmbiguityFunction& xi, const AttributeDescriptor& d, double atom_sd) {
  if (const auto* g = std::get_if<Gaussian>(&xi.variant)) return GaussianMixture{{{1.0, g->mean, g->sd}}};
  if (const auto* gmm = std::get_if<GaussianMixture>(&xi.variant)) return *gmm;
  if (d.kind != DescriptorKind::Numerical)
    throw Error(ErrorCode::UnsupportedPair, "finite function versus density on non-numerical '" + d.name + "'");
  const auto masses = finite_masses(xi, d);
  double total = 0.0;
  for (const auto& [e, w] : masses) total += w;
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "function over '" + d.name + "' has zero mass");
  GaussianMixture out;
  for (const auto& [e, w] : masses)
    if (w > 0.0) out.components.push_back({w / total, map_to_numeric(d, e), atom_sd});
  return out;
}

double log_mixture_density(const GaussianMixture& gmm, double x) {
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(gmm.components.size());
  for (const auto& c : gmm.components) {
    const double z = (x - c.mean) / c.sd;
    const double l = c.weight > 0.0 ? std::log(c.weight) - 0.5 * z * z - std::log(c.sd * std::sqrt(2.0 * std::numbers::pi))
                                    : -std::numeric_limits<double>::infinity();
    logs.push_back(l);
    peak = std::max(peak, l);
  }
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return peak + std::log(sum);
}

double uniform01(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double sample_mixture(const GaussianMixture& gmm, std::mt19937_64& rng) {
  double u = uniform01(rng);
  const MixtureComponent* chosen = &gmm.components.back();
  for (const auto& c : gmm.components) {
    if (u < c.weight) {
      chosen = &c;
      break;
    }
    u -= c.weight;
  }
  // Box-Muller, one draw per call so the stream is easy to reason about.
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return chosen->mean + chosen->sd * z;
}

DivergenceResult gaussian_kl(double m1, double s1, double m2, double s2) {
  const double value = std::log(s2 / s1) + (s1 * s1 + (m1 - m2) * (m1 - m2)) / (2.0 * s2 * s2) - 0.5;
  return DivergenceResult{std::max(0.0, value), "kl", false, 0.0};
}

}  // namespace

DivergenceResult kl_divergence(const AmbiguityFunction& p, const AmbiguityFunction& q, const AttributeDescriptor& d,
                               const DivergenceOptions& options) {
  require_same_descriptor(p, q, d);

  if (!is_density(p) && !is_density(q)) {
    auto [pv, qv] = aligned_masses(p, q, d);
    bool smoothing = false;
    for (std::size_t k = 0; k < pv.size(); ++k)
      if (pv[k] > 0.0 && qv[k] <= 0.0) smoothing = true;
    if (smoothing) {
      const double denom = 1.0 + options.smoothing_epsilon * static_cast<double>(qv.size());
      for (double& v : qv) v = (v + options.smoothing_epsilon) / denom;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < pv.size(); ++k)
      if (pv[k] > 0.0) sum += pv[k] * std::log(pv[k] / qv[k]);
    return DivergenceResult{std::max(0.0, sum), "kl", smoothing, 0.0};
  }

  const bool smoothing = !is_density(p) || !is_density(q);
  const auto pm = as_mixture(p, d, options.atom_sd);
  const auto qm = as_mixture(q, d, options.atom_sd);
  if (pm.components.size() == 1 && qm.components.size() == 1) {
    auto result = gaussian_kl(pm.components[0].mean, pm.components[0].sd, qm.components[0].mean, qm.components[0].sd);
    result.smoothing_applied = smoothing;
    return result;
  }

  if (options.monte_carlo_samples < 2) throw Error(ErrorCode::InvalidArgument, "Monte Carlo KL needs >= 2 samples");
  std::mt19937_64 rng(options.seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  const auto n = static_cast<double>(options.monte_carlo_samples);
  for (std::size_t s = 0; s < options.monte_carlo_samples; ++s) {
    const double x = sample_mixture(pm, rng);
    const double term = log_mixture_density(pm, x) - log_mixture_density(qm, x);
    sum += term;
    sum_sq += term * term;
  }
  const double mean = sum / n;
  const double variance = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return DivergenceResult{std::max(0.0, mean), "kl", smoothing, std::sqrt(variance / n)};
}

DivergenceResult total_variation(const AmbiguityFunction& p, const AmbiguityFunction& q, const AttributeDescriptor& d) {
  require_same_descriptor(p, q, d);
  if (is_density(p) || is_density(q))
    throw Error(ErrorCode::UnsupportedPair, "total variation is provided for finite supports only");
  const auto [pv, qv] = aligned_masses(p, q, d);
  double sum = 0.0;
  for (std::size_t k = 0; k < pv.size(); ++k) sum += std::fabs(pv[k] - qv[k]);
  return DivergenceResult{0.5 * sum, "tv", false, 0.0};
}

DivergenceResult divergence(const AmbiguityFunction& p, const AmbiguityFunction& q, const AttributeDescriptor& d,
                            DivergenceMethod method, const DivergenceOptions& options) {
  return method == DivergenceMethod::KullbackLeibler ? kl_divergence(p, q, d, options) : total_variation(p, q, d);
}

LossResult representation_loss(const EmotionRepresentation& truth, const EmotionRepresentation& prediction,
                               const Scheme& scheme, DivergenceMethod method, const DivergenceOptions& options) {
  if (truth.scheme_ref != scheme.name || prediction.scheme_ref != scheme.name)
    throw Error(ErrorCode::SchemeMismatch, "both representations must reference scheme '" + scheme.name + "'");
  std::set<std::string> names;
  for (const auto& d : scheme.descriptors) names.insert(d.name);
  auto keys = [](const EmotionRepresentation& rep) {
    std::set<std::string> out;
    for (const auto& [name, entry] : rep.per_descriptor) out.insert(name);
    return out;
  };
  if (keys(truth) != names || keys(prediction) != names)
    throw Error(ErrorCode::SchemeMismatch, "representations must cover exactly the scheme's descriptors");

  const auto grid = time_grid(truth);
  const auto other = time_grid(prediction);
  bool same = grid.size() == other.size();
  for (std::size_t t = 0; same && t < grid.size(); ++t) same = std::fabs(grid[t] - other[t]) <= kTolerance;
  if (!same) throw Error(ErrorCode::GridMismatch, "representations use different timestamp grids");

  LossResult result;
  result.method = std::string(to_string(method));
  const std::size_t steps = grid.empty() ? 1 : grid.size();
  double total = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    double at_t = 0.0;
    for (const auto& name : names) {
      const auto& d = scheme.at(name);
      const auto r = divergence(function_at(truth.per_descriptor.at(name), t),
                                function_at(prediction.per_descriptor.at(name), t), d, method, options);
      at_t += r.value;
      result.smoothing_applied = result.smoothing_applied || r.smoothing_applied;
    }
    total += at_t;
    result.per_time.push_back(LossBreakdown{grid.empty() ? 0.0 : grid[t], at_t / static_cast<double>(names.size())});
  }
  result.value = total / static_cast<double>(steps * names.size());
  return result;
}

TimeVaryingAmbiguity implicit_ambiguity(const AnnotationTrace& mean_trace, const AnnotationTrace& variance_trace,
                                        const std::string& descriptor_ref, double sd_floor) {
  if (mean_trace.samples.size() != variance_trace.samples.size())
    throw Error(ErrorCode::GridMismatch, "mean and variance traces have different lengths");
  TimeVaryingAmbiguity out;
  for (std::size_t i = 0; i < mean_trace.samples.size(); ++i) {
    const auto& m = mean_trace.samples[i];
    const auto& v = variance_trace.samples[i];
    if (std::fabs(m.time_s - v.time_s) > 1e-6)
      throw Error(ErrorCode::GridMismatch, "mean and variance traces disagree on timestamps");
    const double variance = v.value.as_value();
    if (variance < 0.0)
      throw Error(ErrorCode::NegativeVariance, "variance " + v.value.to_string() + " at t=" +
                                                   Element::value(v.time_s).to_string(), v.source_line);
    out.times.push_back(m.time_s);
    out.functions.push_back(
        AmbiguityFunction{Gaussian{m.value.as_value(), std::max(std::sqrt(variance), sd_floor)}, descriptor_ref});
  }
  return out;
}

}  // namespace amber
