#include "amber/serialization.hpp"

#include <fstream>
#include <sstream>

#include "amber/error.hpp"
#include "amber/version.hpp"
#include "json_codec.hpp"

namespace amber {

namespace detail {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::FormatError, where + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorCode::FormatError, where + ": expected a number");
  return j.get<double>();
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) throw Error(ErrorCode::FormatError, where + ": expected a string");
  return j.get<std::string>();
}

void check_format_version(const Json& j, const std::string& where) {
  if (!j.contains("format_version")) return;
  const auto& v = j.at("format_version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
    throw Error(ErrorCode::FormatError, where + ": unsupported format_version (expected " +
                                            std::to_string(kFormatVersion) + ")");
}

Json constraint_to_json(const SchemeConstraint& c) {
  switch (c.type) {
    case ConstraintType::None: return Json{{"type", "none"}};
    case ConstraintType::MutuallyExclusive: return Json{{"type", "mutually_exclusive"}};
    case ConstraintType::Blended: return Json{{"type", "blended"}, {"p", c.p}, {"q", c.q}};
  }
  return Json{};
}

SchemeConstraint constraint_from_json(const Json& j) {
  const std::string where = "constraint";
  const auto type = text(require(j, "type", where), where);
  if (type == "none") {
    reject_unknown_fields(j, {"type"}, where);
    return {};
  }
  if (type == "mutually_exclusive") {
    reject_unknown_fields(j, {"type"}, where);
    return {ConstraintType::MutuallyExclusive, 0.0, 0.0};
  }
  if (type == "blended") {
    reject_unknown_fields(j, {"type", "p", "q"}, where);
    return {ConstraintType::Blended, number(require(j, "p", where), where), number(require(j, "q", where), where)};
  }
  throw Error(ErrorCode::FormatError, "unknown constraint type '" + type + "'");
}

}  // namespace

void reject_unknown_fields(const Json& object, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!object.is_object()) throw Error(ErrorCode::FormatError, where + ": expected an object");
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw Error(ErrorCode::FormatError, where + ": unknown field '" + key + "'");
  }
}

Json element_to_json(const Element& e) {
  if (e.is_value()) return Json(e.as_value());
  return Json(e.as_level());
}

Element element_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return Element::value(j.get<double>());
  if (j.is_string()) return Element::level(j.get<std::string>());
  throw Error(ErrorCode::FormatError, where + ": element must be a number or a level name");
}

Json descriptor_to_json(const AttributeDescriptor& d) {
  Json j;
  j["name"] = d.name;
  j["kind"] = std::string(to_string(d.kind));
  if (d.kind != DescriptorKind::Numerical) j["levels"] = d.levels;
  if (d.bounds) j["bounds"] = Json::array({d.bounds->first, d.bounds->second});
  if (d.numeric_map) {
    if (const auto* affine = std::get_if<AffineMap>(&*d.numeric_map)) {
      j["numeric_map"] = Json{{"type", "affine"}, {"a", affine->a}, {"b", affine->b}};
    } else {
      Json values = Json::object();
      for (const auto& [level, v] : std::get<TableMap>(*d.numeric_map).values) values[level] = v;
      j["numeric_map"] = Json{{"type", "table"}, {"values", values}};
    }
  }
  return j;
}

AttributeDescriptor descriptor_from_json(const Json& j) {
  std::string where = "descriptor";
  reject_unknown_fields(j, {"name", "kind", "levels", "bounds", "numeric_map"}, where);
  AttributeDescriptor d;
  d.name = text(require(j, "name", where), where);
  where = "descriptor '" + d.name + "'";
  d.kind = descriptor_kind_from_string(text(require(j, "kind", where), where));
  if (j.contains("levels")) {
    const auto& levels = j.at("levels");
    if (!levels.is_array()) throw Error(ErrorCode::FormatError, where + ": levels must be an array");
    for (const auto& level : levels) d.levels.push_back(text(level, where + " level"));
  }
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    if (!b.is_array() || b.size() != 2) throw Error(ErrorCode::FormatError, where + ": bounds must be [alpha, beta]");
    d.bounds = std::pair{number(b[0], where), number(b[1], where)};
  }
  if (j.contains("numeric_map")) {
    const auto& m = j.at("numeric_map");
    const auto type = text(require(m, "type", where + " numeric_map"), where);
    if (type == "affine") {
      reject_unknown_fields(m, {"type", "a", "b"}, where + " numeric_map");
      d.numeric_map = AffineMap{number(require(m, "a", where), where), number(require(m, "b", where), where)};
    } else if (type == "table") {
      reject_unknown_fields(m, {"type", "values"}, where + " numeric_map");
      const auto& values = require(m, "values", where);
      if (!values.is_object()) throw Error(ErrorCode::FormatError, where + ": table values must be an object");
      TableMap table;
      for (const auto& [level, v] : values.items()) table.values.emplace_back(level, number(v, where));
      d.numeric_map = std::move(table);
    } else {
      throw Error(ErrorCode::FormatError, where + ": unknown numeric_map type '" + type + "'");
    }
  } else if (d.kind == DescriptorKind::Numerical && d.bounds) {
    d.numeric_map = AffineMap{d.bounds->first, d.bounds->second};
  }
  return d;
}

Json scheme_to_json(const Scheme& scheme) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["name"] = scheme.name;
  j["constraint"] = constraint_to_json(scheme.constraint);
  j["descriptors"] = Json::array();
  for (const auto& d : scheme.descriptors) j["descriptors"].push_back(descriptor_to_json(d));
  return j;
}

Scheme scheme_from_json(const Json& j) {
  const std::string where = "scheme";
  reject_unknown_fields(j, {"format_version", "name", "constraint", "descriptors"}, where);
  check_format_version(j, where);
  Scheme scheme;
  scheme.name = text(require(j, "name", where), where);
  if (j.contains("constraint")) scheme.constraint = constraint_from_json(j.at("constraint"));
  const auto& descriptors = require(j, "descriptors", where);
  if (!descriptors.is_array()) throw Error(ErrorCode::FormatError, "scheme: descriptors must be an array");
  for (const auto& d : descriptors) scheme.descriptors.push_back(descriptor_from_json(d));
  const auto report = validate_scheme(scheme);
  if (!report.ok()) throw Error(ErrorCode::FormatError, "invalid scheme: " + report.violations.front());
  return scheme;
}

Json ambiguity_to_json(const AmbiguityFunction& xi) {
  Json j;
  j["variant"] = std::string(variant_name(xi));
  j["descriptor"] = xi.descriptor_ref;
  if (const auto* pm = std::get_if<PointMass>(&xi.variant)) {
    j["element"] = element_to_json(pm->element);
  } else if (const auto* fs = std::get_if<FiniteSupport>(&xi.variant)) {
    j["weights"] = Json::array();
    for (const auto& [e, w] : fs->weights) j["weights"].push_back(Json::array({element_to_json(e), w}));
  } else if (const auto* g = std::get_if<Gaussian>(&xi.variant)) {
    j["mean"] = g->mean;
    j["sd"] = g->sd;
  } else if (const auto* gmm = std::get_if<GaussianMixture>(&xi.variant)) {
    j["components"] = Json::array();
    for (const auto& c : gmm->components)
      j["components"].push_back(Json{{"weight", c.weight}, {"mean", c.mean}, {"sd", c.sd}});
  } else {
    j["p_first"] = std::get<BernoulliPair>(xi.variant).p_first;
  }
  return j;
}

AmbiguityFunction ambiguity_from_json(const Json& j) {
  const std::string where = "ambiguity function";
  const auto variant = text(require(j, "variant", where), where);
  AmbiguityFunction xi;
  xi.descriptor_ref = text(require(j, "descriptor", where), where);
  if (variant == "point_mass") {
    reject_unknown_fields(j, {"variant", "descriptor", "element"}, where);
    xi.variant = PointMass{element_from_json(require(j, "element", where), where)};
  } else if (variant == "finite_support") {
    reject_unknown_fields(j, {"variant", "descriptor", "weights"}, where);
    FiniteSupport fs;
    for (const auto& pair : require(j, "weights", where)) {
      if (!pair.is_array() || pair.size() != 2)
        throw Error(ErrorCode::FormatError, where + ": weights entries are [element, weight]");
      fs.weights.emplace_back(element_from_json(pair[0], where), number(pair[1], where));
    }
    xi.variant = std::move(fs);
  } else if (variant == "gaussian") {
    reject_unknown_fields(j, {"variant", "descriptor", "mean", "sd"}, where);
    xi.variant = Gaussian{number(require(j, "mean", where), where), number(require(j, "sd", where), where)};
  } else if (variant == "gaussian_mixture") {
    reject_unknown_fields(j, {"variant", "descriptor", "components"}, where);
    GaussianMixture gmm;
    for (const auto& c : require(j, "components", where)) {
      reject_unknown_fields(c, {"weight", "mean", "sd"}, where + " component");
      gmm.components.push_back({number(require(c, "weight", where), where), number(require(c, "mean", where), where),
                                number(require(c, "sd", where), where)});
    }
    xi.variant = std::move(gmm);
  } else if (variant == "bernoulli_pair") {
    reject_unknown_fields(j, {"variant", "descriptor", "p_first"}, where);
    xi.variant = BernoulliPair{number(require(j, "p_first", where), where)};
  } else {
    throw Error(ErrorCode::FormatError, "unknown ambiguity variant '" + variant + "'");
  }
  return xi;
}

Json representation_to_json(const EmotionRepresentation& rep, const Scheme* scheme) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "representation";
  j["scheme_ref"] = rep.scheme_ref;
  if (scheme) j["scheme"] = detail::scheme_to_json(*scheme);
  Json entries = Json::object();
  for (const auto& [name, entry] : rep.per_descriptor) {
    if (const auto* constant = std::get_if<AmbiguityFunction>(&entry)) {
      entries[name] = Json{{"constant", detail::ambiguity_to_json(*constant)}};
    } else {
      const auto& series = std::get<TimeVaryingAmbiguity>(entry);
      Json functions = Json::array();
      for (const auto& xi : series.functions) functions.push_back(detail::ambiguity_to_json(xi));
      entries[name] = Json{{"times", series.times}, {"functions", std::move(functions)}};
    }
  }
  j["per_descriptor"] = std::move(entries);
  return j;
}

EmotionRepresentation representation_from_json(const Json& j) {
  const std::string where = "representation";
  reject_unknown_fields(j, {"format_version", "kind", "scheme_ref", "scheme", "per_descriptor", "report"}, where);
  check_format_version(j, where);
  if (j.contains("kind") && j.at("kind") != "representation")
    throw Error(ErrorCode::FormatError, where + ": document kind is not 'representation'");
  EmotionRepresentation rep;
  rep.scheme_ref = text(require(j, "scheme_ref", where), where);
  const auto& entries = require(j, "per_descriptor", where);
  if (!entries.is_object()) throw Error(ErrorCode::FormatError, where + ": per_descriptor must be an object");
  for (const auto& [name, entry] : entries.items()) {
    const std::string at = where + " entry '" + name + "'";
    if (entry.contains("constant")) {
      reject_unknown_fields(entry, {"constant"}, at);
      rep.per_descriptor.emplace(name, ambiguity_from_json(entry.at("constant")));
    } else {
      reject_unknown_fields(entry, {"times", "functions"}, at);
      TimeVaryingAmbiguity series;
      for (const auto& t : require(entry, "times", at)) series.times.push_back(number(t, at));
      for (const auto& f : require(entry, "functions", at)) series.functions.push_back(ambiguity_from_json(f));
      if (series.times.size() != series.functions.size())
        throw Error(ErrorCode::FormatError, at + ": times and functions differ in length");
      rep.per_descriptor.emplace(name, std::move(series));
    }
  }
  return rep;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

std::string scheme_to_json(const Scheme& scheme) { return detail::scheme_to_json(scheme).dump(2) + "\n"; }

Scheme parse_scheme(std::string_view json_text) { return detail::scheme_from_json(detail::parse_json(json_text)); }

std::string ambiguity_to_json(const AmbiguityFunction& xi) { return detail::ambiguity_to_json(xi).dump() + "\n"; }

AmbiguityFunction parse_ambiguity(std::string_view json_text) {
  return detail::ambiguity_from_json(detail::parse_json(json_text));
}

std::string representation_to_json(const EmotionRepresentation& rep, const Scheme* scheme) {
  return detail::representation_to_json(rep, scheme).dump(2) + "\n";
}

RepresentationDocument parse_representation(std::string_view json_text) {
  const auto j = detail::parse_json(json_text);
  RepresentationDocument doc{detail::representation_from_json(j), std::nullopt};
  if (j.contains("scheme")) {
    doc.scheme = detail::scheme_from_json(j.at("scheme"));
    if (doc.scheme->name != doc.representation.scheme_ref)
      throw Error(ErrorCode::SchemeMismatch, "embedded scheme '" + doc.scheme->name + "' does not match scheme_ref '" +
                                                 doc.representation.scheme_ref + "'");
  }
  return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

Scheme load_scheme(const std::filesystem::path& path) { return parse_scheme(read_text_file(path)); }

}  // namespace amber
