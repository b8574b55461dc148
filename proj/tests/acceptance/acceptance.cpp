// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "amber/aggregation.hpp"
#include "amber/ambiguity.hpp"
#include "amber/descriptor.hpp"
#include "amber/metrics.hpp"
#include "amber/ordinal_qa.hpp"
#include "amber/representation.hpp"
#include "amber/serialization.hpp"
#include "amber_test.hpp"

namespace {

using namespace amber;

// Collects failure descriptions; a criterion passes with none.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 20) failures.push_back(what);
    if (!ok && failures.size() == 20) failures.push_back("...");
  }
};

template <class F>
bool throws(F&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// ---------------------------------------------------------------- 1

void point_label_degeneration(Check& c) {
  test::Rng rng(101);
  const auto likert = make_ordinal("likert", {"1", "2", "3", "4", "5"});
  const auto happy = make_categorical("happy");
  const auto arousal = make_numerical("arousal");
  const Scheme scheme{"mixed", {likert, happy, arousal}, {}};
  for (int k = 0; k < 1000; ++k) {
    const std::size_t which = rng.index(3);
    const auto& d = scheme.descriptors[which];
    Element x;
    if (d.kind == DescriptorKind::Numerical)
      x = Element::value(rng.uniform(-1.0, 1.0));
    else
      x = Element::level(d.levels[rng.index(d.levels.size())]);
    const auto xi = from_point_label(d, x);
    if (d.kind == DescriptorKind::Numerical) {
      c.expect(evaluate(xi, d, x) == 1.0, "indicator at the label");
      for (int probe = 0; probe < 5; ++probe) {
        const auto y = Element::value(rng.uniform(-1.0, 1.0));
        c.expect(evaluate(xi, d, y) == (y == x ? 1.0 : 0.0), "indicator off the label");
      }
      c.expect(evaluate(xi, d, Element::value(-1.0)) == (x == Element::value(-1.0) ? 1.0 : 0.0), "indicator at alpha");
    } else {
      for (const auto& level : d.levels) {
        const auto y = Element::level(level);
        c.expect(evaluate(xi, d, y) == (y == x ? 1.0 : 0.0), "indicator on " + d.name + " level " + level);
      }
    }
    EmotionRepresentation rep{scheme.name, {}};
    for (const auto& other : scheme.descriptors) {
      if (other.name == d.name) {
        rep.per_descriptor.emplace(other.name, xi);
      } else {
        const auto filler = other.kind == DescriptorKind::Numerical ? Element::value(0.0) : Element::level(other.levels[0]);
        rep.per_descriptor.emplace(other.name, from_point_label(other, filler));
      }
    }
    const auto single = to_single_valued(rep, scheme, SingleValuePolicy::Mode);
    c.expect(single.values.at(d.name).size() == 1 && single.values.at(d.name).front() == x,
             "to_single_valued does not invert on " + d.name);
  }
}

// ---------------------------------------------------------------- 2

void blended_constraints(Check& c) {
  test::Rng rng(202);
  const std::vector<std::string> names{"anger", "disgust", "fear", "happy", "sad", "surprise"};
  for (int k = 0; k < 2000; ++k) {
    const double p = rng.uniform(0.01, 0.49);
    const double q = 1.0 - p;
    Scheme scheme{"blend", {}, {ConstraintType::Blended, p, q}};
    for (const auto& n : names) scheme.descriptors.push_back(make_categorical(n));
    const auto major = names[rng.index(names.size())];
    auto minor = names[rng.index(names.size())];
    if (minor == major) {
      c.expect(throws([&] { (void)make_blended(major, minor, q, p, scheme); }, ErrorCode::MajorEqualsMinor),
               "major == minor accepted");
      continue;
    }
    const auto rep = make_blended(major, minor, q, p, scheme);
    double sum = 0.0;
    std::size_t nonzero = 0;
    bool weights_ok = true;
    for (const auto& d : scheme.descriptors) {
      const double w = presence_weight(std::get<AmbiguityFunction>(rep.per_descriptor.at(d.name)), d);
      sum += w;
      if (w != 0.0) {
        ++nonzero;
        weights_ok = weights_ok && (w == p || w == q);
      }
    }
    c.expect(std::fabs(sum - 1.0) <= 1e-9, "weights do not sum to 1");
    c.expect(nonzero == 2, "not exactly two nonzero categories");
    c.expect(weights_ok, "weight outside {p, q}");
    c.expect(check_scheme_constraints(rep, scheme).ok(), "validator rejects make_blended output");

    // Invalid parameter sets.
    c.expect(throws([&] { (void)make_blended(major, minor, p, q, scheme); }, ErrorCode::InvalidWeights),
             "p > q accepted");
    c.expect(throws([&] { (void)make_blended(major, minor, 0.5, 0.5, scheme); }, ErrorCode::InvalidWeights),
             "p == q accepted");
    const double drift = rng.uniform(1e-6, 0.2);
    c.expect(throws([&] { (void)make_blended(major, minor, q + drift, p, scheme); }, ErrorCode::InvalidWeights),
             "p + q != 1 accepted");
    c.expect(throws([&] { (void)make_blended(major, minor, 1.0, 0.0, scheme); }, ErrorCode::InvalidWeights),
             "p = 0 accepted");
    c.expect(throws([&] { (void)make_blended(major, "contempt", q, p, scheme); }, ErrorCode::UnknownDescriptor),
             "unknown category accepted");
  }
}

// ---------------------------------------------------------------- 3

void pairwise_worked_value(Check& c) {
  std::vector<TrendMatrix> ims;
  for (int a = 0; a < 6; ++a) {
    TrendMatrix m(2, MatrixKind::Individual);
    m.set_pair(0, 1, a < 4 ? Trend::Rise : Trend::Fall);
    ims.push_back(m);
  }
  const auto d = pairwise_ambiguity(ims, 0, 1);
  c.expect(d.higher == 2.0 / 3.0, "higher != 2/3");
  c.expect(d.lower == 1.0 / 3.0, "lower != 1/3");
  c.expect(d.same == 0.0, "same != 0");
  c.expect(d.annotator_count == 6, "annotator count != 6");
}

// ---------------------------------------------------------------- 4

TrendMatrix counting_oracle(const std::vector<TrendMatrix>& ims, double agreement) {
  const std::size_t n = ims.front().size();
  TrendMatrix out(n, MatrixKind::Consensus);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::map<Trend, std::size_t> counts;
      for (const auto& im : ims) ++counts[im.at(i, j)];
      Trend decided = Trend::NoAgreement;
      for (const auto& [t, count] : counts)
        if (static_cast<double>(count) >= agreement * static_cast<double>(ims.size()) - 1e-9) decided = t;
      out.set_pair(i, j, decided);
    }
  }
  return out;
}

std::vector<Segment> segments_of(std::size_t n, double length) {
  std::vector<Segment> s;
  for (std::size_t k = 0; k < n; ++k)
    s.push_back({"s" + std::to_string(k), static_cast<double>(k) * length, static_cast<double>(k + 1) * length});
  return s;
}

void consensus_oracle(Check& c) {
  test::Rng rng(404);
  const double agreements[] = {0.6, 0.75, 0.8, 1.0};
  for (int instance = 0; instance < 200; ++instance) {
    const std::size_t annotators = 3 + rng.index(4);
    const std::size_t n = 4 + rng.index(5);
    const auto segments = segments_of(n, 2.0);
    const double agreement = agreements[rng.index(4)];
    const double threshold = 0.05;

    // Random traces: 4 samples per segment.
    std::vector<TrendMatrix> ims;
    for (std::size_t a = 0; a < annotators; ++a) {
      std::vector<double> values;
      for (std::size_t k = 0; k < n * 4; ++k) values.push_back(rng.uniform(-0.3, 0.3));
      ims.push_back(individual_matrix(test::make_trace("a" + std::to_string(a), "arousal", values, 0.5), segments,
                                      threshold));
    }
    c.expect(consensus_matrix(ims, agreement) == counting_oracle(ims, agreement),
             "consensus differs from oracle on instance " + std::to_string(instance));

    // Unanimous monotone traces: every annotator is an increasing affine map
    // of shared segment means.
    std::vector<double> means;
    for (std::size_t k = 0; k < n; ++k) means.push_back(rng.uniform(-0.8, 0.8));
    double min_gap = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) min_gap = std::min(min_gap, std::fabs(means[i] - means[j]));
    if (min_gap < 1e-3) continue;
    std::vector<TrendMatrix> monotone;
    for (std::size_t a = 0; a < annotators; ++a) {
      const double scale = rng.uniform(0.5, 2.0);
      const double offset = rng.uniform(-0.2, 0.2);
      std::vector<double> values;
      for (std::size_t k = 0; k < n; ++k)
        for (int s = 0; s < 4; ++s) values.push_back(scale * means[k] + offset);
      monotone.push_back(individual_matrix(test::make_trace("m" + std::to_string(a), "arousal", values, 0.5),
                                           segments, min_gap * 0.4));
    }
    const auto ranking = rank_from_consensus(consensus_matrix(monotone, agreement));
    std::vector<std::size_t> by_mean(n);
    std::iota(by_mean.begin(), by_mean.end(), 0);
    std::stable_sort(by_mean.begin(), by_mean.end(), [&](std::size_t x, std::size_t y) { return means[x] > means[y]; });
    bool same_order = ranking.order.size() == n;
    for (std::size_t r = 0; same_order && r < n; ++r) same_order = ranking.order[r].segment == by_mean[r];
    c.expect(same_order, "ranking differs from sort-by-mean on instance " + std::to_string(instance));
    c.expect(ranking.coverage == 1.0, "coverage != 1 on instance " + std::to_string(instance));
  }
}

// ---------------------------------------------------------------- 5

void aggregation_recovery(Check& c) {
  const auto pop = test::make_population({.annotators = 6, .lag_s = 3.0, .noise_sd = 0.05, .seed = 505});
  std::vector<AnnotationTrace> search{pop.truth};
  search.insert(search.end(), pop.annotators.begin(), pop.annotators.end());
  const double delay = estimate_delay(search);
  c.expect(std::fabs(delay - 3.0) <= 0.1 + 1e-9, "delay " + std::to_string(delay) + " not within 0.1 s of 3.0");

  // Recovered scale_p maps annotator p onto the pooled scale, so
  // scale_p * a_p is the same for every annotator.
  const auto normalized = normalize_annotators(align_lag(pop.annotators, delay));
  std::vector<double> products;
  for (std::size_t p = 0; p < pop.annotators.size(); ++p)
    products.push_back(normalized.models[p].scale * pop.scales[p]);
  double log_sum = 0.0;
  for (double v : products) log_sum += std::log(v);
  const double centre = std::exp(log_sum / static_cast<double>(products.size()));
  for (std::size_t p = 0; p < products.size(); ++p) {
    const double rel = products[p] / centre - 1.0;
    c.expect(std::fabs(rel) <= 0.05, "scale of annotator " + std::to_string(p + 1) + " off by " +
                                         std::to_string(rel * 100.0) + "%");
  }

  test::Rng rng(506);
  std::vector<double> bimodal;
  for (int k = 0; k < 600; ++k) bimodal.push_back((k % 2 == 0 ? -0.5 : 0.5) + rng.normal(0.0, 0.05));
  const auto fit = fit_gmm(bimodal, 2, {.family = FitFamily::Gmm, .components = 2, .seed = 507});
  auto comps = fit.mixture.components;
  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.mean < b.mean; });
  c.expect(comps.size() == 2, "gmm(2) returned " + std::to_string(comps.size()) + " components");
  if (comps.size() == 2) {
    c.expect(std::fabs(comps[0].mean + 0.5) <= 0.05, "lower mean " + std::to_string(comps[0].mean));
    c.expect(std::fabs(comps[1].mean - 0.5) <= 0.05, "upper mean " + std::to_string(comps[1].mean));
  }

  // The same recovery through the per-instant fit on a 6-annotator population.
  const auto arousal = make_numerical("arousal");
  std::vector<AnnotationTrace> traces;
  for (int p = 0; p < 6; ++p) {
    std::vector<double> values;
    for (int t = 0; t < 50; ++t) values.push_back((p < 3 ? -0.5 : 0.5) + rng.normal(0.0, 0.05));
    traces.push_back(test::make_trace("p" + std::to_string(p + 1), "arousal", values, 0.1));
  }
  std::size_t within = 0;
  for (int t = 0; t < 50; ++t) {
    const auto xi = fit_ambiguity(traces, arousal, 0.1 * t, {.family = FitFamily::Gmm, .components = 2, .seed = 508});
    auto parts = std::get<GaussianMixture>(xi.variant).components;
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.mean < b.mean; });
    if (parts.size() == 2 && std::fabs(parts[0].mean + 0.5) <= 0.1 && std::fabs(parts[1].mean - 0.5) <= 0.1) ++within;
  }
  c.expect(within == 50, "per-instant gmm(2) separated the modes at " + std::to_string(within) + "/50 instants");
}

// ---------------------------------------------------------------- 6

void divergence_correctness(Check& c) {
  const auto arousal = make_numerical("arousal", -5.0, 5.0);
  const auto kl = [&](const AmbiguityVariant& p, const AmbiguityVariant& q, const AttributeDescriptor& d) {
    return kl_divergence(AmbiguityFunction{p, d.name}, AmbiguityFunction{q, d.name}, d).value;
  };
  const double closed = kl(Gaussian{0.0, 1.0}, Gaussian{1.0, 1.0}, arousal);
  c.expect(std::fabs(closed - 0.5) <= 1e-9, "KL(N(0,1), N(1,1)) = " + std::to_string(closed));

  const auto likert = make_ordinal("likert", {"1", "2", "3"});
  const auto pair = make_comparison_descriptor("pair");
  const std::vector<std::pair<AmbiguityVariant, const AttributeDescriptor*>> families{
      {PointMass{Element::value(0.2)}, &arousal},
      {PointMass{Element::level("2")}, &likert},
      {FiniteSupport{{{Element::level("1"), 0.2}, {Element::level("2"), 0.5}, {Element::level("3"), 0.3}}}, &likert},
      {Gaussian{0.3, 0.4}, &arousal},
      {GaussianMixture{{{0.3, -1.0, 0.2}, {0.7, 1.5, 0.6}}}, &arousal},
      {BernoulliPair{0.7}, &pair},
  };
  for (const auto& [variant, d] : families) {
    const auto xi = AmbiguityFunction{variant, d->name};
    const double self = kl(variant, variant, *d);
    c.expect(std::fabs(self) <= 1e-6, "KL(P,P) = " + std::to_string(self) + " for " + std::string(variant_name(xi)));
  }

  test::Rng rng(606);
  std::size_t violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t n = 2 + rng.index(5);
    std::vector<std::string> levels;
    for (std::size_t i = 0; i < n; ++i) levels.push_back("l" + std::to_string(i));
    const auto d = make_ordinal("o", levels);
    FiniteSupport p, q;
    for (const auto& level : levels) {
      // Zero entries exercise the smoothing path.
      p.weights.emplace_back(Element::level(level), rng.index(5) == 0 ? 0.0 : rng.uniform(0.0, 1.0));
      q.weights.emplace_back(Element::level(level), rng.index(5) == 0 ? 0.0 : rng.uniform(0.0, 1.0));
    }
    p.weights[0].second += 0.01;
    q.weights[0].second += 0.01;
    if (kl(p, q, d) < 0.0) ++violations;
  }
  c.expect(violations == 0, std::to_string(violations) + " negative KL values");
}

// ---------------------------------------------------------------- 7

std::string slurp(const std::filesystem::path& path) {
  try {
    return read_text_file(path);
  } catch (const Error&) {
    return {};
  }
}

void cli_determinism(Check& c) {
  const std::string cli = AMBER_CLI_PATH;
  if (cli.empty()) {
    c.expect(false, "amber CLI was not built");
    return;
  }
  const std::filesystem::path fixtures = AMBER_FIXTURE_DIR;
  const auto fx = [&](const char* name) { return "'" + (fixtures / name).string() + "'"; };
  const std::vector<std::pair<std::string, std::string>> steps{
      {"aggregate_gmm.json", "aggregate " + fx("traces.csv") + " " + fx("scheme.json") + " --family gmm --components 2"},
      {"aggregate_wm.json",
       "aggregate " + fx("traces.csv") + " " + fx("scheme.json") + " --family weighted-mean --normalize"},
      {"ranking.json", "qa-rank " + fx("traces.csv") + " --segments " + fx("segments.csv") +
                           " --attribute arousal --threshold 0.05 --agreement 0.8"},
      {"self.json", "divergence aggregate_gmm.json aggregate_gmm.json"},
      {"cross.json", "divergence aggregate_gmm.json aggregate_wm.json"},
      {"aggregate_emp.json", "aggregate " + fx("traces.csv") + " " + fx("scheme.json") + " --family empirical"},
      {"tv.json", "divergence aggregate_emp.json aggregate_emp.json --method tv"},
      {"validate.json", "validate " + fx("happy.json") + " " + fx("emotions.json")},
      {"likert_numeric.csv",
       "convert " + fx("likert.csv") + " " + fx("likert_scheme.json") + " --attribute intensity --map low=-1,medium=0,high=1"},
      {"report.json", "report aggregate_gmm.json ranking.json cross.json validate.json"},
  };
  const auto root = std::filesystem::temp_directory_path() / "amber_acceptance_determinism";
  std::filesystem::remove_all(root);
  for (const char* run : {"run1", "run2"}) {
    const auto dir = root / run;
    std::filesystem::create_directories(dir);
    for (const auto& [output, args] : steps) {
      const std::string cmd =
          "cd '" + dir.string() + "' && '" + cli + "' --seed 7 " + args + " -o " + output + " 2>/dev/null";
      const int status = std::system(cmd.c_str());
      c.expect(status == 0, std::string(run) + ": '" + args + "' exited with " + std::to_string(status));
    }
  }
  for (const auto& [output, args] : steps) {
    const auto a = slurp(root / "run1" / output);
    const auto b = slurp(root / "run2" / output);
    c.expect(!a.empty(), output + " is empty");
    c.expect(a == b, output + " differs between runs");
  }
  std::filesystem::remove_all(root);
}

// ---------------------------------------------------------------- 8

void metric_axioms(Check& c) {
  test::Rng rng(808);
  std::vector<AttributeDescriptor> numericals{make_numerical("valence"), make_numerical("arousal", 0.0, 1.0),
                                              make_numerical("rating", 1.0, 9.0, AffineMap{-1.0, 1.0}),
                                              make_numerical("wide", -100.0, 100.0)};
  for (const auto& d : numericals) {
    const auto [alpha, beta] = *d.bounds;
    for (int k = 0; k < 10000; ++k) {
      const auto x = Element::value(rng.uniform(alpha, beta));
      const auto y = Element::value(rng.uniform(alpha, beta));
      const auto z = Element::value(rng.uniform(alpha, beta));
      const double xy = distance(d, x, y);
      const double yx = distance(d, y, x);
      const double xz = distance(d, x, z);
      const double yz = distance(d, y, z);
      c.expect(xy == yx, d.name + ": asymmetric distance");
      c.expect(distance(d, x, x) == 0.0, d.name + ": d(x, x) != 0");
      c.expect((xy == 0.0) == (x == y), d.name + ": d(x, y) = 0 for x != y");
      c.expect(xz <= xy + yz, d.name + ": triangle inequality violated");
    }
  }
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Check&)> run;
  double limit_s;  // 0 = untimed
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "point-label degeneration and inversion (1000 labels)", point_label_degeneration, 1.0},
      {2, "blended constraints hold for make_blended output", blended_constraints, 0.0},
      {3, "pairwise ambiguity 4 higher / 2 lower = (2/3, 1/3, 0)", pairwise_worked_value, 0.0},
      {4, "consensus equals counting oracle; monotone ranking (200 instances)", consensus_oracle, 10.0},
      {5, "lag, scale and bimodal gmm recovery", aggregation_recovery, 30.0},
      {6, "divergence closed form, self-divergence, non-negativity", divergence_correctness, 0.0},
      {7, "CLI pipeline byte-identical across runs", cli_determinism, 0.0},
      {8, "distance metric axioms (10000 triples per descriptor)", metric_axioms, 0.0},
  };
  int failed = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("unexpected exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.limit_s > 0.0 && elapsed >= criterion.limit_s)
      check.failures.push_back("took " + std::to_string(elapsed) + " s, limit " + std::to_string(criterion.limit_s));
    const bool ok = check.failures.empty();
    if (!ok) ++failed;
    std::printf("%s  %d  %s  (%.3f s)\n", ok ? "PASS" : "FAIL", criterion.id, criterion.title, elapsed);
    for (const auto& f : check.failures) std::printf("      %s\n", f.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
