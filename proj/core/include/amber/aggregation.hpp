#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amber/ambiguity.hpp"
#include "amber/descriptor.hpp"

namespace amber {

struct Sample {
  double time_s = 0.0;
  Element value;
  std::size_t source_line = 0;  // 0 when not read from a file

  friend bool operator==(const Sample& a, const Sample& b) { return a.time_s == b.time_s && a.value == b.value; }
};

/// One annotator's labels for one attribute, times strictly increasing.
struct AnnotationTrace {
  std::string annotator;
  std::string attribute;
  std::vector<Sample> samples;
  double sample_period_s = 0.0;

  friend bool operator==(const AnnotationTrace&, const AnnotationTrace&) = default;
};

/// Per-annotator affine map x -> scale * x + offset plus a confidence weight.
struct AnnotatorModel {
  std::string annotator;
  double offset = 0.0;
  double scale = 1.0;
  double confidence = 1.0;
};

/// Real values of a numerical trace. Error(NonNumericalAttribute) on levels.
std::vector<double> trace_values(const AnnotationTrace& trace);

/// Pearson correlation; nullopt when either side has zero variance or the
/// inputs have fewer than 2 points.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

/// Timestamps present in every trace (matched to 1e-6 s), ascending.
/// Error(GridMismatch) when sample periods differ or nothing is shared.
std::vector<double> common_times(const std::vector<AnnotationTrace>& traces);

/// Value of a trace at `time` (matched to 1e-6 s), if it has a sample there.
std::optional<Element> value_at(const AnnotationTrace& trace, double time);

/// Static reaction-lag compensation: every sample time moves to t - delay_s
/// and samples landing before t = 0 are dropped.
std::vector<AnnotationTrace> align_lag(const std::vector<AnnotationTrace>& traces, double delay_s);

struct DelaySearch {
  double max_delay_s = 8.0;
  double step_s = 0.1;
  std::size_t min_overlap = 20;
};

/// Lag of traces[1..] behind the reference traces[0]: the candidate delay in
/// [0, max_delay_s] maximizing the mean Pearson correlation between the
/// reference and each shifted trace. Off-grid shifts interpolate linearly;
/// ties go to the smaller delay.
double estimate_delay(const std::vector<AnnotationTrace>& traces, const DelaySearch& search = {});

struct NormalizedTraces {
  std::vector<AnnotationTrace> traces;
  std::vector<AnnotatorModel> models;
};

/// Maps each trace affinely so its mean and (population) variance match the
/// pooled values over all annotators. Assumes each annotator's map is
/// time-invariant.
NormalizedTraces normalize_annotators(const std::vector<AnnotationTrace>& traces);

/// Leave-one-out confidence: max(0, corr(trace_p, mean of the others)),
/// renormalized to sum to 1. Needs at least 3 annotators.
std::vector<AnnotatorModel> confidence_weights(const std::vector<AnnotationTrace>& traces);

/// Confidence-weighted average at every shared timestamp.
AnnotationTrace weighted_mean_label(const std::vector<AnnotationTrace>& traces,
                                    const std::vector<AnnotatorModel>& models);

enum class FitFamily { Empirical, Gaussian, Gmm };

std::string_view to_string(FitFamily family) noexcept;
FitFamily fit_family_from_string(std::string_view text);

struct FitOptions {
  FitFamily family = FitFamily::Gaussian;
  std::size_t components = 2;
  std::size_t restarts = 50;
  std::size_t max_iterations = 200;
  double tolerance = 1e-8;
  double sd_floor = 1e-3;
  std::uint64_t seed = 0;
};

/// Ambiguity function from the annotators' values at time `t`.
AmbiguityFunction fit_ambiguity(const std::vector<AnnotationTrace>& traces, const AttributeDescriptor& d, double t,
                                const FitOptions& options = {});

/// fit_ambiguity over every shared timestamp.
TimeVaryingAmbiguity fit_ambiguity_series(const std::vector<AnnotationTrace>& traces, const AttributeDescriptor& d,
                                          const FitOptions& options = {});

struct GmmFit {
  GaussianMixture mixture;
  double log_likelihood = 0.0;
  std::size_t restart = 0;
  std::size_t iterations = 0;
};

/// One-dimensional EM with k-means++ seeding. Restart r draws from a
/// generator seeded by (seed, r); the fit with the highest log-likelihood
/// wins, ties to the lowest restart. Components are returned sorted by mean.
GmmFit fit_gmm(std::span<const double> values, std::size_t components, const FitOptions& options);

}  // namespace amber
