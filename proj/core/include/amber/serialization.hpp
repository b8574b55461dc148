#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "amber/ambiguity.hpp"
#include "amber/descriptor.hpp"
#include "amber/representation.hpp"

namespace amber {

// JSON documents carry "format_version": 1. Scheme files reject unknown
// fields at every level; see docs/formats.md for the schemas.

std::string scheme_to_json(const Scheme& scheme);
Scheme parse_scheme(std::string_view json_text);

std::string ambiguity_to_json(const AmbiguityFunction& xi);
AmbiguityFunction parse_ambiguity(std::string_view json_text);

struct RepresentationDocument {
  EmotionRepresentation representation;
  std::optional<Scheme> scheme;  // embedded copy, when present
};

/// Serializes a representation; embeds `scheme` when given.
std::string representation_to_json(const EmotionRepresentation& rep, const Scheme* scheme = nullptr);
RepresentationDocument parse_representation(std::string_view json_text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

Scheme load_scheme(const std::filesystem::path& path);

}  // namespace amber
