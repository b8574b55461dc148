#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "amber/ambiguity.hpp"
#include "amber/descriptor.hpp"
#include "amber/representation.hpp"

namespace amber::detail {

using Json = nlohmann::ordered_json;

/// Error(FormatError) naming the first key of `object` outside `allowed`.
void reject_unknown_fields(const Json& object, std::initializer_list<const char*> allowed, const std::string& where);

Json element_to_json(const Element& e);
Element element_from_json(const Json& j, const std::string& where);

Json descriptor_to_json(const AttributeDescriptor& d);
AttributeDescriptor descriptor_from_json(const Json& j);

Json scheme_to_json(const Scheme& scheme);
Scheme scheme_from_json(const Json& j);

Json ambiguity_to_json(const AmbiguityFunction& xi);
AmbiguityFunction ambiguity_from_json(const Json& j);

Json representation_to_json(const EmotionRepresentation& rep, const Scheme* scheme);
EmotionRepresentation representation_from_json(const Json& j);

Json parse_json(std::string_view text);

}  // namespace amber::detail
