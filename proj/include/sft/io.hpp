#pragma once

#include "sft/domino.hpp"
#include "sft/sft.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sft {

using json = nlohmann::json;

/// Reads and parses a JSON file; Parse errors name the file, line and column.
json read_json_file(const std::string& path);
json parse_json(const std::string& text, const std::string& source);

/// A group file as written, so that serializing it reproduces the input.
///
///   {"family": "free_abelian", "params": {"rank": 2}}
///   {"family": "integers_with_steps", "params": {"steps": [2, 3]}}
///   {"family": "lattice", "params": {"vectors": [[1], [2]]}, "generators": ["x", "y"], "relators": ["xxY"]}
///   {"family": "free" | "cyclic" | "free_product", "params": {"rank" | "modulus" | "orders": ...}}
///   {"family": "presentation", "generators": ["a", "b"], "relators": ["abAB"], "wp_budget": 100000}
struct GroupFile {
    std::string family;
    json params = json::object();
    std::optional<std::vector<std::string>> generators;
    std::optional<std::vector<std::string>> relators;
    std::optional<std::size_t> wp_budget;

    friend bool operator==(const GroupFile&, const GroupFile&) = default;
};

GroupFile group_file_from_json(const json& j);
json to_json(const GroupFile& f);
Group build_group(const GroupFile& f);

/// {"alphabet": [...], "patterns": [{"support": [words], "assign": [letters]}], "radius": r}.
/// A simple alphabet is a list of names; a product alphabet is a list of
/// {"name", "values"} components, and its letters join values with '|'.
PatternSet patterns_from_json(const json& j, const Group& g);
/// Predicate pattern sets serialize as {"alphabet", "radius", "predicate": name}
/// and cannot be read back.
json to_json(const PatternSet& ps);
json to_json(const Alphabet& a);
Alphabet alphabet_from_json(const json& j, const std::string& where);

/// A list of [north, east, south, west] colors, bare or under "tiles".
WangTileSet wang_from_json(const json& j);
json to_json(const WangTileSet& ts);

/// {"cells": [[word, letter], ...]} in ball order.
json to_json(const Patch& p, const Alphabet& a);
Patch patch_from_json(const json& j, const Group& g, const Alphabet& a);
json to_json(const PeriodicConfig& pc, const Alphabet& a);
json to_json(const DominoOutcome& o, const Alphabet& a);

/// Z^2 patch as 24px unit squares, north up, colored by letter from a fixed palette.
std::string patch_svg(const Patch& p, const Alphabet& a);

} // namespace sft
