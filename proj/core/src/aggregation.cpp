#include "amber/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "amber/error.hpp"

namespace amber {

namespace {

constexpr double kTimeMatch = 1e-6;

long long time_key(double t) { return std::llround(t / kTimeMatch); }

void require_common_period(const std::vector<AnnotationTrace>& traces) {
  for (const auto& trace : traces)
    if (std::fabs(trace.sample_period_s - traces.front().sample_period_s) > kTolerance)
      throw Error(ErrorCode::GridMismatch, "trace '" + trace.annotator + "' has sample period " +
                                               Element::value(trace.sample_period_s).to_string() + " s, expected " +
                                               Element::value(traces.front().sample_period_s).to_string() + " s");
}

// Value matrix on the shared grid: rows are traces, columns timestamps.
std::vector<std::vector<double>> values_on(const std::vector<AnnotationTrace>& traces,
                                           const std::vector<double>& times) {
  std::vector<std::vector<double>> out;
  out.reserve(traces.size());
  for (const auto& trace : traces) {
    std::vector<double> row;
    row.reserve(times.size());
    for (double t : times) row.push_back(value_at(trace, t)->as_value());
    out.push_back(std::move(row));
  }
  return out;
}

// Linear interpolation of a trace's values at time t; nullopt outside its span.
std::optional<double> interpolate(const std::vector<double>& times, const std::vector<double>& values, double t) {
  if (times.empty() || t < times.front() - kTimeMatch || t > times.back() + kTimeMatch) return std::nullopt;
  const auto it = std::lower_bound(times.begin(), times.end(), t - kTimeMatch);
  const auto i = static_cast<std::size_t>(it - times.begin());
  if (std::fabs(times[i] - t) <= kTimeMatch || i == 0) return values[i];
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return values[i - 1] + w * (values[i] - values[i - 1]);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_variance(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> trace_values(const AnnotationTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.samples.size());
  for (const auto& s : trace.samples) {
    if (!s.value.is_value())
      throw Error(ErrorCode::NonNumericalAttribute,
                  "trace '" + trace.annotator + "' on '" + trace.attribute + "' holds level labels", s.source_line);
    out.push_back(s.value.as_value());
  }
  return out;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  const double n = static_cast<double>(a.size());
  const auto flat = [n](double ss, double m) { return !(std::sqrt(ss / n) > 1e-12 * std::max(1.0, std::fabs(m))); };
  if (flat(saa, ma) || flat(sbb, mb)) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> common_times(const std::vector<AnnotationTrace>& traces) {
  if (traces.empty()) throw Error(ErrorCode::InsufficientData, "no traces");
  require_common_period(traces);
  std::map<long long, std::pair<double, std::size_t>> counts;
  for (const auto& trace : traces) {
    std::set<long long> seen;
    for (const auto& s : trace.samples) {
      const auto key = time_key(s.time_s);
      if (!seen.insert(key).second) continue;
      auto [it, inserted] = counts.try_emplace(key, s.time_s, 0);
      ++it->second.second;
    }
  }
  std::vector<double> out;
  for (const auto& [key, entry] : counts)
    if (entry.second == traces.size()) out.push_back(entry.first);
  if (out.empty()) throw Error(ErrorCode::GridMismatch, "traces share no timestamps");
  return out;
}

std::optional<Element> value_at(const AnnotationTrace& trace, double time) {
  const auto it = std::lower_bound(trace.samples.begin(), trace.samples.end(), time - kTimeMatch,
                                   [](const Sample& s, double t) { return s.time_s < t; });
  if (it != trace.samples.end() && std::fabs(it->time_s - time) <= kTimeMatch) return it->value;
  return std::nullopt;
}

std::vector<AnnotationTrace> align_lag(const std::vector<AnnotationTrace>& traces, double delay_s) {
  if (!(delay_s >= 0.0) || !std::isfinite(delay_s)) throw Error(ErrorCode::InvalidArgument, "delay must be >= 0");
  if (traces.empty()) return {};
  require_common_period(traces);
  std::vector<AnnotationTrace> out;
  out.reserve(traces.size());
  for (const auto& trace : traces) {
    AnnotationTrace shifted{trace.annotator, trace.attribute, {}, trace.sample_period_s};
    for (const auto& s : trace.samples) {
      double t = s.time_s - delay_s;
      if (t < -kTimeMatch) continue;
      // Snap to the microsecond grid used for time matching.
      t = static_cast<double>(time_key(t)) * kTimeMatch;
      if (t == 0.0) t = 0.0;  // no negative zero
      shifted.samples.push_back(Sample{t, s.value, s.source_line});
    }
    out.push_back(std::move(shifted));
  }
  return out;
}

double estimate_delay(const std::vector<AnnotationTrace>& traces, const DelaySearch& search) {
  if (traces.size() < 2) throw Error(ErrorCode::InsufficientData, "delay estimation needs at least 2 traces");
  if (!(search.step_s > 0.0) || !(search.max_delay_s >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "delay search needs step > 0 and max >= 0");
  require_common_period(traces);

  std::vector<std::vector<double>> times(traces.size());
  std::vector<std::vector<double>> values(traces.size());
  for (std::size_t k = 0; k < traces.size(); ++k) {
    values[k] = trace_values(traces[k]);
    for (const auto& s : traces[k].samples) times[k].push_back(s.time_s);
  }

  const auto steps = static_cast<std::size_t>(std::floor(search.max_delay_s / search.step_s + 1e-9));
  std::optional<double> best_score;
  double best_delay = 0.0;
  std::vector<double> ref;
  std::vector<double> other;
  for (std::size_t step = 0; step <= steps; ++step) {
    const double delay = static_cast<double>(step) * search.step_s;
    double total = 0.0;
    bool valid = true;
    for (std::size_t k = 1; k < traces.size() && valid; ++k) {
      ref.clear();
      other.clear();
      for (std::size_t i = 0; i < times[0].size(); ++i) {
        if (const auto v = interpolate(times[k], values[k], times[0][i] + delay)) {
          ref.push_back(values[0][i]);
          other.push_back(*v);
        }
      }
      const auto r = ref.size() >= search.min_overlap ? pearson(ref, other) : std::nullopt;
      if (r)
        total += *r;
      else
        valid = false;
    }
    if (!valid) continue;
    const double score = total / static_cast<double>(traces.size() - 1);
    if (!best_score || score > *best_score) {
      best_score = score;
      best_delay = delay;
    }
  }
  if (!best_score)
    throw Error(ErrorCode::InsufficientData,
                "correlation undefined at every candidate delay (constant traces or fewer than " +
                    std::to_string(search.min_overlap) + " overlapping samples)");
  return best_delay;
}

NormalizedTraces normalize_annotators(const std::vector<AnnotationTrace>& traces) {
  if (traces.empty()) throw Error(ErrorCode::InsufficientData, "no traces to normalize");
  std::vector<std::vector<double>> values;
  std::vector<double> pooled;
  for (const auto& trace : traces) {
    values.push_back(trace_values(trace));
    const auto& v = values.back();
    std::set<double> distinct(v.begin(), v.end());
    if (distinct.size() < 2)
      throw Error(ErrorCode::DegenerateTrace, "trace '" + trace.annotator + "' has fewer than 2 distinct values");
    pooled.insert(pooled.end(), v.begin(), v.end());
  }
  const double pooled_mean = mean_of(pooled);
  const double pooled_sd = std::sqrt(population_variance(pooled, pooled_mean));

  NormalizedTraces out;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const double m = mean_of(values[k]);
    const double sd = std::sqrt(population_variance(values[k], m));
    if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateTrace, "trace '" + traces[k].annotator + "' has zero variance");
    const double scale = pooled_sd / sd;
    const double offset = pooled_mean - scale * m;
    AnnotationTrace mapped = traces[k];
    for (std::size_t i = 0; i < mapped.samples.size(); ++i)
      mapped.samples[i].value = Element::value(pooled_mean + (values[k][i] - m) * scale);
    out.traces.push_back(std::move(mapped));
    out.models.push_back(AnnotatorModel{traces[k].annotator, offset, scale, 1.0});
  }
  return out;
}

std::vector<AnnotatorModel> confidence_weights(const std::vector<AnnotationTrace>& traces) {
  if (traces.size() < 3)
    throw Error(ErrorCode::InsufficientData, "confidence weighting needs at least 3 annotators");
  const auto times = common_times(traces);
  const auto matrix = values_on(traces, times);
  const std::size_t p_count = traces.size();

  std::vector<double> confidence(p_count, 0.0);
  std::vector<double> others(times.size());
  for (std::size_t p = 0; p < p_count; ++p) {
    for (std::size_t t = 0; t < times.size(); ++t) {
      double sum = 0.0;
      for (std::size_t q = 0; q < p_count; ++q)
        if (q != p) sum += matrix[q][t];
      others[t] = sum / static_cast<double>(p_count - 1);
    }
    confidence[p] = std::max(0.0, pearson(matrix[p], others).value_or(0.0));
  }
  const double total = std::accumulate(confidence.begin(), confidence.end(), 0.0);
  if (!(total > 0.0))
    throw Error(ErrorCode::InsufficientData, "no annotator correlates positively with the others");

  std::vector<AnnotatorModel> models;
  for (std::size_t p = 0; p < p_count; ++p)
    models.push_back(AnnotatorModel{traces[p].annotator, 0.0, 1.0, confidence[p] / total});
  return models;
}

AnnotationTrace weighted_mean_label(const std::vector<AnnotationTrace>& traces,
                                    const std::vector<AnnotatorModel>& models) {
  if (traces.empty()) throw Error(ErrorCode::InsufficientData, "no traces to average");
  std::vector<double> weights;
  for (const auto& trace : traces) {
    const auto it = std::find_if(models.begin(), models.end(),
                                 [&](const AnnotatorModel& m) { return m.annotator == trace.annotator; });
    if (it == models.end()) throw Error(ErrorCode::InvalidArgument, "no model for annotator '" + trace.annotator + "'");
    if (it->confidence < 0.0) throw Error(ErrorCode::InvalidWeights, "negative confidence weight");
    weights.push_back(it->confidence);
  }
  if (std::fabs(std::accumulate(weights.begin(), weights.end(), 0.0) - 1.0) > kTolerance)
    throw Error(ErrorCode::InvalidWeights, "annotator weights must sum to 1");

  const auto times = common_times(traces);
  const auto matrix = values_on(traces, times);
  AnnotationTrace out{"weighted_mean", traces.front().attribute, {}, traces.front().sample_period_s};
  out.samples.reserve(times.size());
  for (std::size_t t = 0; t < times.size(); ++t) {
    double sum = 0.0;
    double lo = matrix[0][t];
    double hi = matrix[0][t];
    for (std::size_t p = 0; p < traces.size(); ++p) {
      sum += weights[p] * matrix[p][t];
      lo = std::min(lo, matrix[p][t]);
      hi = std::max(hi, matrix[p][t]);
    }
    out.samples.push_back(Sample{times[t], Element::value(std::clamp(sum, lo, hi)), 0});
  }
  return out;
}

std::string_view to_string(FitFamily family) noexcept {
  switch (family) {
    case FitFamily::Empirical: return "empirical";
    case FitFamily::Gaussian: return "gaussian";
    case FitFamily::Gmm: return "gmm";
  }
  return "?";
}

FitFamily fit_family_from_string(std::string_view text) {
  if (text == "empirical") return FitFamily::Empirical;
  if (text == "gaussian") return FitFamily::Gaussian;
  if (text == "gmm") return FitFamily::Gmm;
  throw Error(ErrorCode::InvalidArgument, "unknown fit family '" + std::string(text) + "'");
}

namespace {

AmbiguityFunction fit_empirical(const std::vector<Element>& observed, const AttributeDescriptor& d) {
  const double n = static_cast<double>(observed.size());
  if (d.kind == DescriptorKind::Categorical) {
    const auto present = std::count(observed.begin(), observed.end(), Element::level(kPresent));
    return presence(d, static_cast<double>(present) / n);
  }
  FiniteSupport fs;
  if (d.kind == DescriptorKind::Numerical) {
    std::map<double, std::size_t> counts;
    for (const auto& x : observed) ++counts[x.as_value()];
    for (const auto& [v, c] : counts) fs.weights.emplace_back(Element::value(v), static_cast<double>(c) / n);
  } else {
    for (const auto& level : d.levels) {
      const auto c = std::count(observed.begin(), observed.end(), Element::level(level));
      if (c > 0) fs.weights.emplace_back(Element::level(level), static_cast<double>(c) / n);
    }
  }
  return AmbiguityFunction{std::move(fs), d.name};
}

// f_n without the bounds check; normalized labels may leave [alpha, beta].
double unchecked_map(const AttributeDescriptor& d, double v) {
  const auto& affine = std::get<AffineMap>(*d.numeric_map);
  const auto [alpha, beta] = *d.bounds;
  if (affine.a == alpha && affine.b == beta) return v;
  return affine.a + (v - alpha) * (affine.b - affine.a) / (beta - alpha);
}

}  // namespace

AmbiguityFunction fit_ambiguity(const std::vector<AnnotationTrace>& traces, const AttributeDescriptor& d, double t,
                                const FitOptions& options) {
  std::vector<Element> observed;
  for (const auto& trace : traces) {
    if (trace.attribute != d.name)
      throw Error(ErrorCode::DomainMismatch, "trace '" + trace.annotator + "' labels '" + trace.attribute +
                                                 "', not '" + d.name + "'");
    if (auto v = value_at(trace, t)) {
      // Normalized numerical labels may leave [alpha, beta]; only the kind is checked.
      const bool ok = d.kind == DescriptorKind::Numerical ? v->is_value() : contains(d, *v);
      if (!ok)
        throw Error(ErrorCode::DomainMismatch, v->to_string() + " is not in descriptor '" + d.name + "'");
      observed.push_back(std::move(*v));
    }
  }
  if (observed.size() < 2)
    throw Error(ErrorCode::InsufficientData, "fewer than 2 annotator values at t=" + Element::value(t).to_string());
  if (options.family == FitFamily::Empirical) return fit_empirical(observed, d);

  if (d.kind != DescriptorKind::Numerical)
    throw Error(ErrorCode::NonNumericalAttribute,
                std::string(to_string(options.family)) + " fit needs a numerical descriptor, '" + d.name + "' is not");
  std::vector<double> mapped;
  mapped.reserve(observed.size());
  for (const auto& x : observed) mapped.push_back(unchecked_map(d, x.as_value()));

  const bool single = options.family == FitFamily::Gaussian || options.components == 1;
  if (options.family == FitFamily::Gmm && options.components == 0)
    throw Error(ErrorCode::InvalidArgument, "gmm needs at least one component");
  if (options.family == FitFamily::Gmm && options.components > mapped.size())
    throw Error(ErrorCode::InsufficientData, "more mixture components than annotator values");
  if (single) {
    const double m = mean_of(mapped);
    double ss = 0.0;
    for (double v : mapped) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(mapped.size() - 1));
    return AmbiguityFunction{Gaussian{m, std::max(sd, options.sd_floor)}, d.name};
  }
  return AmbiguityFunction{fit_gmm(mapped, options.components, options).mixture, d.name};
}

TimeVaryingAmbiguity fit_ambiguity_series(const std::vector<AnnotationTrace>& traces, const AttributeDescriptor& d,
                                          const FitOptions& options) {
  TimeVaryingAmbiguity out;
  out.times = common_times(traces);
  out.functions.reserve(out.times.size());
  for (double t : out.times) out.functions.push_back(fit_ambiguity(traces, d, t, options));
  return out;
}

}  // namespace amber
