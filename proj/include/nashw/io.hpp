#pragma once

#include "nashw/instance.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace nashw {

// Instance documents:
//   { "weights": [1, "3/2"],
//     "profile": { "kind": "additive",     "matrix": [[...], ...] } }
//              | { "kind": "identical",    "values": [...] }
//              | { "kind": "two_valuable", "goods": m,
//                  "tables": [ { "goods": [j, j'], "single": [v_j, v_j'], "pair": v_jj' }, ... ] }
// Rationals are JSON numbers or "p/q" strings. Errors carry a field path.
Instance parse_instance(std::string_view text);
Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const Instance& instance);
// Canonical form: integers as numbers, everything else as "p/q".
std::string serialize_instance(const Instance& instance);

// { "bundles": [[0-based good ids], ...] }
Allocation parse_allocation(std::string_view text);
Allocation allocation_from_json(const nlohmann::json& doc);
nlohmann::json allocation_to_json(const Allocation& allocation);
std::string serialize_allocation(const Allocation& allocation);

nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& value, const std::string& path);

std::string read_file(const std::string& path);

}  // namespace nashw
