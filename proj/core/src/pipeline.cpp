#include "amber/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "amber/error.hpp"
#include "amber/io.hpp"
#include "amber/log.hpp"
#include "amber/ordinal_qa.hpp"
#include "amber/representation.hpp"
#include "amber/serialization.hpp"
#include "amber/version.hpp"
#include "json_codec.hpp"

namespace amber {

using detail::Json;

namespace {

const std::set<std::string>& known_commands() {
  static const std::set<std::string> commands{"validate", "aggregate", "qa-rank", "convert", "divergence", "report"};
  return commands;
}

Json config_to_json(const PipelineConfig& c) {
  return Json{{"command", c.command},
              {"inputs", c.inputs},
              {"scheme", c.scheme_path},
              {"segments", c.segments_path},
              {"family", c.family},
              {"components", c.components},
              {"delay", c.delay},
              {"reference", c.reference},
              {"normalize", c.normalize},
              {"threshold", c.threshold},
              {"agreement", c.agreement},
              {"attribute", c.attribute},
              {"map", c.map_spec},
              {"method", c.method},
              {"seed", c.seed},
              {"format_version", c.format_version}};
}

struct Report {
  std::vector<std::string> assumptions;
  std::vector<std::string> warnings;

  Json to_json(const PipelineConfig& config) const {
    return Json{{"software_version", kVersion},
                {"format_version", kFormatVersion},
                {"command", config.command},
                {"config_hash", config_hash(config)},
                {"seed", config.seed},
                {"assumptions", assumptions},
                {"warnings", warnings}};
  }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string input(const PipelineConfig& c, std::size_t k, const char* what) {
  if (k >= c.inputs.size()) throw Error(ErrorCode::InvalidArgument, std::string("missing input: ") + what);
  return c.inputs[k];
}

// Scheme from --scheme, else from the given positional input.
Scheme scheme_from(const PipelineConfig& c, std::size_t positional) {
  if (!c.scheme_path.empty()) return load_scheme(c.scheme_path);
  return load_scheme(input(c, positional, "scheme.json"));
}

std::string key_of(double t) { return std::to_string(std::llround(t * 1e6)); }

// ---------------------------------------------------------------- validate

PipelineResult run_validate(const PipelineConfig& c) {
  const auto doc = parse_representation(read_text_file(input(c, 0, "representation.json")));
  const Scheme scheme = scheme_from(c, 1);
  const auto result = check_scheme_constraints(doc.representation, scheme);
  Report report;
  if (scheme.constraint.type != ConstraintType::None)
    report.assumptions.emplace_back("categorical constraints imply labels constant over the interval of interest");
  Json out{{"format_version", kFormatVersion},
           {"kind", "validation"},
           {"valid", result.ok()},
           {"violations", result.violations},
           {"warnings", result.warnings},
           {"report", report.to_json(c)}};
  return {dump(out), result.ok() ? 0 : 1};
}

// --------------------------------------------------------------- aggregate

PipelineResult run_aggregate(const PipelineConfig& c) {
  const Scheme scheme = scheme_from(c, 1);
  auto all = ingest_traces(input(c, 0, "traces.csv"), &scheme);
  Report report;

  std::map<std::string, std::vector<AnnotationTrace>> by_attribute;
  std::map<std::string, AnnotationTrace> references;
  for (auto& trace : all) {
    if (!c.reference.empty() && trace.annotator == c.reference)
      references.emplace(trace.attribute, std::move(trace));
    else
      by_attribute[trace.attribute].push_back(std::move(trace));
  }
  if (!c.reference.empty() && references.empty())
    throw Error(ErrorCode::InvalidArgument, "reference trace '" + c.reference + "' not found");

  FitOptions fit;
  const bool weighted_mean = c.family == "weighted-mean";
  fit.family = weighted_mean ? FitFamily::Gaussian : fit_family_from_string(c.family);
  fit.components = c.components;
  fit.seed = c.seed;
  if (fit.family == FitFamily::Gmm)
    report.assumptions.push_back("gmm fitted by EM: " + std::to_string(fit.restarts) + " restarts, " +
                                 std::to_string(fit.max_iterations) + " iterations, log-likelihood tolerance 1e-8, " +
                                 "sd floor 1e-3, k-means++ seeding");
  report.assumptions.emplace_back("annotator transcription maps are assumed time-invariant");

  Json delays = Json::object();
  Json normalization = Json::object();
  Json confidences = Json::object();
  std::map<std::string, AnnotationTrace> point_labels;

  for (const auto& d : scheme.descriptors) {
    auto it = by_attribute.find(d.name);
    if (it == by_attribute.end() || it->second.empty())
      throw Error(ErrorCode::InsufficientData, "no annotator traces for descriptor '" + d.name + "'");
    auto& traces = it->second;
    if (d.kind != DescriptorKind::Numerical) continue;

    double delay = 0.0;
    if (c.delay == "auto") {
      const auto ref = references.find(d.name);
      if (ref == references.end())
        throw Error(ErrorCode::InvalidArgument, "--delay auto needs a --reference trace for '" + d.name + "'");
      std::vector<AnnotationTrace> search{ref->second};
      search.insert(search.end(), traces.begin(), traces.end());
      delay = estimate_delay(search);
      report.assumptions.push_back("reaction lag on '" + d.name + "' estimated against reference '" + c.reference + "'");
    } else {
      const auto parsed = parse_real(c.delay);
      if (!parsed) throw Error(ErrorCode::InvalidArgument, "--delay must be a number of seconds or 'auto'");
      delay = *parsed;
    }
    delays[d.name] = delay;
    if (delay > 0.0) traces = align_lag(traces, delay);

    if (c.normalize) {
      auto normalized = normalize_annotators(traces);
      Json models = Json::array();
      for (const auto& m : normalized.models)
        models.push_back(Json{{"annotator", m.annotator}, {"offset", m.offset}, {"scale", m.scale}});
      normalization[d.name] = std::move(models);
      traces = std::move(normalized.traces);
      std::size_t outside = 0;
      for (const auto& t : traces)
        for (const auto& s : t.samples)
          if (!contains(d, s.value)) ++outside;
      if (outside > 0)
        report.warnings.push_back(std::to_string(outside) + " normalized samples on '" + d.name +
                                  "' fall outside the descriptor bounds");
    }

    if (weighted_mean) {
      const auto models = confidence_weights(traces);
      Json weights = Json::object();
      for (const auto& m : models) weights[m.annotator] = m.confidence;
      confidences[d.name] = std::move(weights);
      point_labels.emplace(d.name, weighted_mean_label(traces, models));
    }
  }
  if (c.normalize)
    report.assumptions.emplace_back("annotators normalized by affine mean/variance matching to the pooled reference");
  if (weighted_mean)
    report.assumptions.emplace_back("single-valued labels: confidence-weighted mean, confidence = leave-one-out correlation clipped at 0");

  // Shared grid across all descriptors.
  std::map<std::string, std::pair<double, std::size_t>> counts;
  for (const auto& d : scheme.descriptors) {
    for (double t : common_times(by_attribute.at(d.name))) {
      auto [it, inserted] = counts.try_emplace(key_of(t), t, 0);
      ++it->second.second;
    }
  }
  std::vector<double> grid;
  for (const auto& [key, entry] : counts)
    if (entry.second == scheme.descriptors.size()) grid.push_back(entry.first);
  std::sort(grid.begin(), grid.end());
  if (grid.empty()) throw Error(ErrorCode::GridMismatch, "descriptors share no timestamps after alignment");

  EmotionRepresentation rep{scheme.name, {}};
  for (const auto& d : scheme.descriptors) {
    const auto& traces = by_attribute.at(d.name);
    TimeVaryingAmbiguity series;
    FitOptions options = fit;
    if (d.kind != DescriptorKind::Numerical) {
      options.family = FitFamily::Empirical;
      report.assumptions.push_back("'" + d.name + "' is not numerical; fitted with the empirical family");
    }
    for (double t : grid) {
      series.times.push_back(t);
      if (weighted_mean && d.kind == DescriptorKind::Numerical)
        series.functions.push_back(AmbiguityFunction{PointMass{*value_at(point_labels.at(d.name), t)}, d.name});
      else
        series.functions.push_back(fit_ambiguity(traces, d, t, options));
    }
    rep.per_descriptor.emplace(d.name, std::move(series));
  }

  const auto check = check_scheme_constraints(rep, scheme);
  for (const auto& v : check.violations) report.warnings.push_back("constraint: " + v);
  for (const auto& w : check.warnings) report.warnings.push_back(w);

  Json out = detail::representation_to_json(rep, &scheme);
  Json details{{"delays_s", delays}};
  if (c.normalize) details["normalization"] = normalization;
  if (weighted_mean) details["confidence"] = confidences;
  Json r = report.to_json(c);
  r["aggregation"] = std::move(details);
  out["report"] = std::move(r);
  return {dump(out), 0};
}

// ----------------------------------------------------------------- qa-rank

PipelineResult run_qa_rank(const PipelineConfig& c) {
  if (c.segments_path.empty()) throw Error(ErrorCode::InvalidArgument, "--segments is required");
  std::optional<Scheme> scheme;
  if (!c.scheme_path.empty()) scheme = load_scheme(c.scheme_path);
  const auto all = ingest_traces(input(c, 0, "traces.csv"), scheme ? &*scheme : nullptr);
  const auto segments = ingest_segments_text(read_text_file(c.segments_path));

  std::set<std::string> attributes;
  for (const auto& t : all) attributes.insert(t.attribute);
  std::string attribute = c.attribute;
  if (attribute.empty()) {
    if (attributes.size() != 1)
      throw Error(ErrorCode::InvalidArgument, "traces hold several attributes; pick one with --attribute");
    attribute = *attributes.begin();
  }

  std::vector<std::string> annotators;
  std::vector<TrendMatrix> ims;
  for (const auto& t : all) {
    if (t.attribute != attribute) continue;
    annotators.push_back(t.annotator);
    ims.push_back(individual_matrix(t, segments, c.threshold));
  }
  if (ims.empty()) throw Error(ErrorCode::InsufficientData, "no traces for attribute '" + attribute + "'");
  const auto consensus = consensus_matrix(ims, c.agreement);
  const auto ranking = rank_from_consensus(consensus);

  Report report;
  report.assumptions.emplace_back("segments are closed-open intervals [start, end)");
  report.assumptions.emplace_back("trend threshold " + format_real(c.threshold) + ", agreement " +
                                  format_real(c.agreement));
  report.assumptions.emplace_back("partial orders resolved by Copeland score with segment-index tie-break");

  Json ids = Json::array();
  for (const auto& s : segments) ids.push_back(s.id);
  Json matrix = Json::array();
  for (std::size_t i = 0; i < consensus.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < consensus.size(); ++j) row.push_back(std::string(to_string(consensus.at(i, j))));
    matrix.push_back(std::move(row));
  }
  Json ranked = Json::array();
  for (const auto& r : ranking.order)
    ranked.push_back(Json{{"segment", segments[r.segment].id}, {"index", r.segment}, {"rank", r.rank},
                          {"score", r.score}});
  Json pairwise = Json::array();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      const auto dist = pairwise_ambiguity(ims, i, j);
      pairwise.push_back(Json{{"i", i}, {"j", j}, {"higher", dist.higher}, {"lower", dist.lower},
                              {"same", dist.same}, {"annotator_count", dist.annotator_count}});
    }
  }
  Json out{{"format_version", kFormatVersion},
           {"kind", "qa_ranking"},
           {"attribute", attribute},
           {"threshold", c.threshold},
           {"agreement", c.agreement},
           {"annotators", annotators},
           {"segments", ids},
           {"consensus_matrix", matrix},
           {"ranking", ranked},
           {"coverage", ranking.coverage},
           {"pairwise", pairwise},
           {"report", report.to_json(c)}};
  return {dump(out), 0};
}

// ----------------------------------------------------------------- convert

TableMap parse_map_spec(const std::string& spec, const AttributeDescriptor& d) {
  std::map<std::string, double> entries;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = std::min(spec.find(',', pos), spec.size());
    const auto item = spec.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--map entries look like level=value");
    const auto value = parse_real(item.substr(eq + 1));
    if (!value) throw Error(ErrorCode::InvalidArgument, "--map value for '" + item.substr(0, eq) + "' is not a number");
    entries[item.substr(0, eq)] = *value;
    pos = comma + 1;
  }
  TableMap table;
  for (const auto& level : d.levels) {
    const auto it = entries.find(level);
    if (it == entries.end()) throw Error(ErrorCode::InvalidArgument, "--map does not assign level '" + level + "'");
    table.values.emplace_back(level, it->second);
  }
  if (entries.size() != d.levels.size())
    throw Error(ErrorCode::InvalidArgument, "--map names levels outside descriptor '" + d.name + "'");
  return table;
}

PipelineResult run_convert(const PipelineConfig& c) {
  const Scheme scheme = scheme_from(c, 1);
  auto traces = ingest_traces(input(c, 0, "traces.csv"), &scheme);
  if (c.attribute.empty()) throw Error(ErrorCode::InvalidArgument, "--attribute is required");
  AttributeDescriptor d = scheme.at(c.attribute);
  if (!c.map_spec.empty()) {
    if (d.kind == DescriptorKind::Numerical)
      throw Error(ErrorCode::InvalidArgument, "'" + d.name + "' is already numerical");
    d = attach_numeric_map(d, parse_map_spec(c.map_spec, d));
  }
  for (auto& trace : traces) {
    if (trace.attribute != d.name) continue;
    for (auto& s : trace.samples) s.value = Element::value(map_to_numeric(d, s.value));
  }
  return {traces_to_csv(traces), 0};
}

// -------------------------------------------------------------- divergence

PipelineResult run_divergence(const PipelineConfig& c) {
  const auto truth = parse_representation(read_text_file(input(c, 0, "true.json")));
  const auto pred = parse_representation(read_text_file(input(c, 1, "pred.json")));
  Scheme scheme;
  if (!c.scheme_path.empty())
    scheme = load_scheme(c.scheme_path);
  else if (truth.scheme)
    scheme = *truth.scheme;
  else if (pred.scheme)
    scheme = *pred.scheme;
  else
    throw Error(ErrorCode::InvalidArgument, "no scheme: pass --scheme or embed one in the representation");

  DivergenceOptions options;
  options.seed = c.seed;
  const auto loss =
      representation_loss(truth.representation, pred.representation, scheme, divergence_method_from_string(c.method),
                          options);
  Report report;
  report.assumptions.emplace_back("loss is the mean divergence over descriptors and timestamps");
  if (loss.smoothing_applied)
    report.assumptions.emplace_back("zero-probability mismatches smoothed (epsilon 1e-6; atoms widened to sd 1e-3)");
  if (loss.method == "kl")
    report.assumptions.emplace_back("mixture KL estimated by Monte Carlo with 10000 seeded samples");

  Json per_time = Json::array();
  for (const auto& p : loss.per_time) per_time.push_back(Json{{"time", p.time}, {"value", p.value}});
  Json out{{"format_version", kFormatVersion},
           {"kind", "divergence"},
           {"method", loss.method},
           {"value", loss.value},
           {"smoothing_applied", loss.smoothing_applied},
           {"per_time", per_time},
           {"report", report.to_json(c)}};
  return {dump(out), 0};
}

// ------------------------------------------------------------------ report

Json summarize(const std::string& path) {
  const auto j = detail::parse_json(read_text_file(path));
  Json summary{{"path", path}};
  const std::string kind = j.contains("kind") && j.at("kind").is_string() ? j.at("kind").get<std::string>() : "unknown";
  summary["kind"] = kind;
  if (kind == "representation") {
    const auto rep = detail::representation_from_json(j);
    summary["scheme_ref"] = rep.scheme_ref;
    Json descriptors = Json::object();
    for (const auto& [name, entry] : rep.per_descriptor) {
      std::map<std::string, std::size_t> variants;
      std::size_t steps = 1;
      if (const auto* series = std::get_if<TimeVaryingAmbiguity>(&entry)) {
        steps = series->functions.size();
        for (const auto& xi : series->functions) ++variants[std::string(variant_name(xi))];
      } else {
        ++variants[std::string(variant_name(std::get<AmbiguityFunction>(entry)))];
      }
      Json v = Json::object();
      for (const auto& [n, count] : variants) v[n] = count;
      descriptors[name] = Json{{"timestamps", steps}, {"variants", v}};
    }
    summary["descriptors"] = descriptors;
  } else {
    for (const char* key : {"valid", "value", "method", "coverage", "attribute"})
      if (j.contains(key)) summary[key] = j.at(key);
  }
  if (j.contains("report")) summary["provenance"] = j.at("report");
  return summary;
}

PipelineResult run_report(const PipelineConfig& c) {
  if (c.inputs.empty()) throw Error(ErrorCode::InvalidArgument, "report needs at least one artifact");
  Json artifacts = Json::array();
  for (const auto& path : c.inputs) artifacts.push_back(summarize(path));
  Json out{{"format_version", kFormatVersion},
           {"kind", "report"},
           {"artifacts", artifacts},
           {"report", Report{}.to_json(c)}};
  return {dump(out), 0};
}

}  // namespace

void validate_config(const PipelineConfig& c) {
  if (!known_commands().contains(c.command))
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + c.command + "'");
  if (c.format_version != kFormatVersion)
    throw Error(ErrorCode::FormatError, "unsupported --format-version " + std::to_string(c.format_version));
  for (const auto& path : c.inputs)
    if (path.empty()) throw Error(ErrorCode::InvalidArgument, "empty input path");
  if (c.components == 0) throw Error(ErrorCode::InvalidArgument, "--components must be >= 1");
  if (!(c.threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "--threshold must be > 0");
  if (!(c.agreement > 0.5 && c.agreement <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "--agreement must lie in (0.5, 1]");
  if (c.method != "kl" && c.method != "tv") throw Error(ErrorCode::InvalidArgument, "--method must be kl or tv");
  if (c.family != "weighted-mean") fit_family_from_string(c.family);
}

std::string config_hash(const PipelineConfig& config) {
  const std::string canonical = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  validate_config(config);
  log::debug("running '" + config.command + "' (config " + config_hash(config) + ")");
  try {
    if (config.command == "validate") return run_validate(config);
    if (config.command == "aggregate") return run_aggregate(config);
    if (config.command == "qa-rank") return run_qa_rank(config);
    if (config.command == "convert") return run_convert(config);
    if (config.command == "divergence") return run_divergence(config);
    return run_report(config);
  } catch (const Error& e) {
    throw Error(e.code(), config.command + ": " + e.message(), e.line());
  }
}

}  // namespace amber
