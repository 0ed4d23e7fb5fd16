#pragma once

#include <json.hpp>
#include <string>

#include "otelbaev/potential.hpp"

namespace otelbaev {

/// JSON form: {"kind": "...", ...}. `sum` nests {"terms": [A, B]}, `scaled` nests {"child": A}.
nlohmann::json spec_to_json(const PotentialSpec& spec);

/// Parses and validates; throws InvalidSpec on malformed documents.
PotentialSpec spec_from_json(const nlohmann::json& j);
PotentialSpec spec_from_string(const std::string& text);

}  // namespace otelbaev
