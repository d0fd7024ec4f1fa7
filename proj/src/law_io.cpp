#include "recdev/law_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "recdev/error.hpp"

namespace recdev {

using nlohmann::json;

namespace {

double number_field(json const& doc, char const* key) {
    json const& v = doc.at(key);
    if (!v.is_number()) throw Error(Errc::BadLawFile, fmt::format("field '{}' must be a number", key));
    return v.get<double>();
}

}  // namespace

RawLaw parse_law_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (json::parse_error const& e) {
        throw Error(Errc::BadLawFile, fmt::format("law JSON does not parse: {}", e.what()));
    }
    if (!doc.is_object()) throw Error(Errc::BadLawFile, "law JSON must be an object");
    for (auto const& [key, value] : doc.items()) {
        if (key != "side" && key != "kind" && key != "q" && key != "p" && key != "gamma" && key != "beta") {
            throw Error(Errc::BadLawFile, fmt::format("unknown field '{}'", key));
        }
    }

    RawLaw raw;
    if (!doc.contains("side") || !doc["side"].is_string()) throw Error(Errc::BadLawFile, "'side' must be a string");
    std::string const side = doc["side"].get<std::string>();
    if (side == "right") {
        raw.side = Side::Right;
    } else if (side == "left") {
        raw.side = Side::Left;
    } else {
        throw Error(Errc::BadLawFile, fmt::format("side '{}' is not right|left", side));
    }

    std::string kind = "finite";
    if (doc.contains("kind")) {
        if (!doc["kind"].is_string()) throw Error(Errc::BadLawFile, "'kind' must be a string");
        kind = doc["kind"].get<std::string>();
    }
    if (kind == "finite") {
        raw.kind = LawKind::Finite;
    } else if (kind == "stable") {
        raw.kind = LawKind::Stable;
    } else {
        throw Error(Errc::BadLawFile, fmt::format("kind '{}' is not finite|stable", kind));
    }

    if (doc.contains("q")) raw.q = number_field(doc, "q");
    if (doc.contains("gamma")) raw.gamma = number_field(doc, "gamma");
    if (doc.contains("beta")) raw.beta = number_field(doc, "beta");
    if (doc.contains("p")) {
        json const& p = doc["p"];
        if (!p.is_array()) throw Error(Errc::BadLawFile, "'p' must be an array");
        for (json const& v : p) {
            if (!v.is_number()) throw Error(Errc::BadLawFile, "'p' entries must be numbers");
            raw.p.push_back(v.get<double>());
        }
    }
    return raw;
}

std::string law_to_json(StepLaw const& law) {
    json doc;
    doc["side"] = law.side() == Side::Right ? "right" : "left";
    if (law.kind() == LawKind::Finite) {
        doc["kind"] = "finite";
        doc["q"] = law.q();
        doc["p"] = law.p();
    } else {
        doc["kind"] = "stable";
        doc["gamma"] = law.gamma();
        doc["beta"] = law.beta();
    }
    return doc.dump();
}

StepLaw load_law(std::string const& source) {
    try {
        return builtin_law(source);
    } catch (Error const& e) {
        if (e.code() != Errc::UnknownName) throw;
    }
    std::filesystem::path const path(source);
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(Errc::UnknownName, fmt::format("'{}' is neither a builtin law nor a readable file", source));
    }
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return validate_law(parse_law_json(buffer.str()));
}

}  // namespace recdev
