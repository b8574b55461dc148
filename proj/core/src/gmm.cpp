#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "amber/aggregation.hpp"
#include "amber/error.hpp"

namespace amber {

namespace {

// Uniform in [0, 1) from the raw engine output; std distributions are not
// reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick_weighted(std::mt19937_64& rng, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(weights.size()));
  double target = uniform01(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    target -= weights[i];
    if (target < 0.0) return i;
  }
  return weights.size() - 1;
}

std::vector<double> kmeanspp_centers(std::span<const double> x, std::size_t k, std::mt19937_64& rng) {
  std::vector<double> centers;
  centers.reserve(k);
  centers.push_back(x[std::min(x.size() - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(x.size())))]);
  std::vector<double> d2(x.size());
  while (centers.size() < k) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (x[i] - c) * (x[i] - c));
      d2[i] = best;
    }
    centers.push_back(x[pick_weighted(rng, d2)]);
  }
  return centers;
}

double log_normal_pdf(double x, double mean, double sd) noexcept {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

struct EmState {
  std::vector<MixtureComponent> components;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
};

EmState run_em(std::span<const double> x, std::vector<double> means, double init_sd, const FitOptions& opt) {
  const std::size_t n = x.size();
  const std::size_t k = means.size();
  EmState state;
  state.components.resize(k);
  for (std::size_t j = 0; j < k; ++j) state.components[j] = {1.0 / static_cast<double>(k), means[j], init_sd};

  std::vector<double> resp(n * k);
  std::vector<double> logp(k);
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
    // E step
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const auto& c = state.components[j];
        logp[j] = c.weight > 0.0 ? std::log(c.weight) + log_normal_pdf(x[i], c.mean, c.sd)
                                 : -std::numeric_limits<double>::infinity();
        peak = std::max(peak, logp[j]);
      }
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += std::exp(logp[j] - peak);
      const double log_total = peak + std::log(sum);
      ll += log_total;
      for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = std::exp(logp[j] - log_total);
    }
    state.log_likelihood = ll;
    state.iterations = iter + 1;
    if (std::fabs(ll - previous) < opt.tolerance) break;
    previous = ll;

    // M step
    for (std::size_t j = 0; j < k; ++j) {
      double nk = 0.0;
      double sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + j];
        sx += resp[i * k + j] * x[i];
      }
      auto& c = state.components[j];
      c.weight = nk / static_cast<double>(n);
      if (nk <= 1e-300) continue;
      c.mean = sx / nk;
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) var += resp[i * k + j] * (x[i] - c.mean) * (x[i] - c.mean);
      c.sd = std::max(std::sqrt(var / nk), opt.sd_floor);
    }
  }
  return state;
}

}  // namespace

GmmFit fit_gmm(std::span<const double> values, std::size_t components, const FitOptions& options) {
  if (components == 0) throw Error(ErrorCode::InvalidArgument, "gmm needs at least one component");
  if (values.size() < components)
    throw Error(ErrorCode::InsufficientData, "gmm with " + std::to_string(components) + " components needs at least " +
                                                 std::to_string(components) + " values");
  if (options.restarts == 0) throw Error(ErrorCode::InvalidArgument, "gmm needs at least one restart");

  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double init_sd = std::max(std::sqrt(var / n), options.sd_floor);

  GmmFit best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < options.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(options.seed >> 32), static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    auto state = run_em(values, kmeanspp_centers(values, components, rng), init_sd, options);
    if (state.log_likelihood > best.log_likelihood) {
      best.mixture.components = std::move(state.components);
      best.log_likelihood = state.log_likelihood;
      best.restart = r;
      best.iterations = state.iterations;
    }
  }

  auto& comps = best.mixture.components;
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.mean < b.mean; });
  const double total = std::accumulate(comps.begin(), comps.end(), 0.0,
                                       [](double s, const MixtureComponent& c) { return s + c.weight; });
  for (auto& c : comps) c.weight /= total;
  return best;
}

}  // namespace amber
