#pragma once

#include <string>
#include <string_view>

#include "recdev/walk_model.hpp"

namespace recdev {

/// Parses the JSON step-law schema
///   {"side": "right"|"left", "kind": "finite"|"stable",
///    "q": number, "p": [numbers], "gamma": number, "beta": number}
/// rejecting unknown fields and wrong types with BadLawFile.
RawLaw parse_law_json(std::string_view text);

/// Canonical JSON for a validated law; parse_law_json + validate_law
/// reproduces it exactly.
std::string law_to_json(StepLaw const& law);

/// A builtin name, or else a path to a JSON law file.
StepLaw load_law(std::string const& source);

}  // namespace recdev
