#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amber/aggregation.hpp"
#include "amber/ambiguity.hpp"
#include "amber/representation.hpp"

namespace amber {

enum class DivergenceMethod { KullbackLeibler, TotalVariation };

std::string_view to_string(DivergenceMethod method) noexcept;
DivergenceMethod divergence_method_from_string(std::string_view text);

struct DivergenceResult {
  double value = 0.0;
  std::string method;
  bool smoothing_applied = false;
  double standard_error = 0.0;  // Monte Carlo estimates only
};

struct DivergenceOptions {
  double smoothing_epsilon = 1e-6;
  double atom_sd = 1e-3;  // width given to atoms compared against a density
  std::size_t monte_carlo_samples = 10000;
  std::uint64_t seed = 0;
};

/// KL(p || q). Finite pairs are summed exactly, with epsilon smoothing of q
/// when p puts mass where q has none. Gaussian pairs use the closed form;
/// pairs involving a mixture use a fixed-seed Monte Carlo estimate drawn
/// from p. Atoms compared with a density are widened into narrow Gaussians
/// (flagged as smoothing).
DivergenceResult kl_divergence(const AmbiguityFunction& p, const AmbiguityFunction& q, const AttributeDescriptor& d,
                               const DivergenceOptions& options = {});

/// Half the L1 distance between two finite distributions.
DivergenceResult total_variation(const AmbiguityFunction& p, const AmbiguityFunction& q, const AttributeDescriptor& d);

DivergenceResult divergence(const AmbiguityFunction& p, const AmbiguityFunction& q, const AttributeDescriptor& d,
                            DivergenceMethod method, const DivergenceOptions& options = {});

struct LossBreakdown {
  double time = 0.0;  // NaN-free; 0 for constant representations
  double value = 0.0;
};

struct LossResult {
  double value = 0.0;
  std::vector<LossBreakdown> per_time;
  bool smoothing_applied = false;
  std::string method;
};

/// Mean divergence over descriptors and timestamps, accumulated in ascending
/// time and descriptor-name order.
LossResult representation_loss(const EmotionRepresentation& truth, const EmotionRepresentation& prediction,
                               const Scheme& scheme, DivergenceMethod method, const DivergenceOptions& options = {});

/// Gaussian(mean_t, max(sqrt(variance_t), sd_floor)) at each shared timestamp.
TimeVaryingAmbiguity implicit_ambiguity(const AnnotationTrace& mean_trace, const AnnotationTrace& variance_trace,
                                        const std::string& descriptor_ref, double sd_floor = 1e-3);

}  // namespace amber
