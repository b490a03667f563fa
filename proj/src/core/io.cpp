#include "nashw/io.hpp"

#include "nashw/errors.hpp"

#include <fstream>
#include <sstream>

namespace nashw {

using nlohmann::json;

namespace {

std::string idx(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw ParseError(path.empty() ? key : path + "." + key, "expected an array");
  return v;
}

std::vector<Rational> rational_list(const json& arr, const std::string& path) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(rational_from_json(arr[i], idx(path, i)));
  return out;
}

GoodId good_index(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path, "expected an integer good index");
  return v.get<GoodId>();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

json rational_to_json(const Rational& r) {
  if (is_integer(r)) {
    const BigInt& num = boost::multiprecision::numerator(r);
    if (num >= std::numeric_limits<std::int64_t>::min() && num <= std::numeric_limits<std::int64_t>::max()) {
      return num.convert_to<std::int64_t>();
    }
  }
  return to_string(r);
}

Rational rational_from_json(const json& value, const std::string& path) {
  try {
    if (value.is_number_integer()) {
      return value.is_number_unsigned() ? Rational(value.get<std::uint64_t>()) : Rational(value.get<std::int64_t>());
    }
    if (value.is_number_float()) return rational_from_double(value.get<double>());
    if (value.is_string()) return parse_rational(value.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
  throw ParseError(path, "expected a number or \"p/q\" string");
}

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "instance must be a JSON object");
  std::vector<Rational> weights = rational_list(require_array(doc, "weights", ""), "weights");
  const json& profile = require(doc, "profile", "");
  const json& kind_field = require(profile, "kind", "profile");
  if (!kind_field.is_string()) throw ParseError("profile.kind", "expected a string");
  const std::string kind = kind_field.get<std::string>();

  if (kind == "additive") {
    const json& matrix = require_array(profile, "matrix", "profile");
    AdditiveMatrix p;
    for (std::size_t i = 0; i < matrix.size(); ++i) {
      if (!matrix[i].is_array()) throw ParseError(idx("profile.matrix", i), "expected an array");
      p.values.push_back(rational_list(matrix[i], idx("profile.matrix", i)));
    }
    std::size_t m = p.values.empty() ? 0 : p.values.front().size();
    return Instance(std::move(weights), m, std::move(p));
  }
  if (kind == "identical") {
    IdenticalAdditive p{rational_list(require_array(profile, "values", "profile"), "profile.values")};
    std::size_t m = p.values.size();
    return Instance(std::move(weights), m, std::move(p));
  }
  if (kind == "two_valuable") {
    const json& goods = require(profile, "goods", "profile");
    if (!goods.is_number_integer() || goods.get<long long>() < 0) {
      throw ParseError("profile.goods", "expected a nonnegative good count");
    }
    const json& tables = require_array(profile, "tables", "profile");
    TwoValuable p;
    for (std::size_t i = 0; i < tables.size(); ++i) {
      const std::string path = idx("profile.tables", i);
      TwoValuableTable t;
      const json& ids = require_array(tables[i], "goods", path);
      if (ids.size() > 2) throw ParseError(path + ".goods", "at most two valued goods per agent");
      for (std::size_t k = 0; k < ids.size(); ++k) t.goods.push_back(good_index(ids[k], idx(path + ".goods", k)));
      t.single = rational_list(require_array(tables[i], "single", path), path + ".single");
      if (t.goods.size() == 2) t.pair = rational_from_json(require(tables[i], "pair", path), path + ".pair");
      p.tables.push_back(std::move(t));
    }
    return Instance(std::move(weights), goods.get<std::size_t>(), std::move(p));
  }
  throw ParseError("profile.kind", "unknown profile kind '" + kind + "'");
}

Instance parse_instance(std::string_view text) { return instance_from_json(parse_json(text)); }

json instance_to_json(const Instance& instance) {
  json doc;
  json weights = json::array();
  for (const auto& w : instance.weights()) weights.push_back(rational_to_json(w));
  doc["weights"] = weights;
  json profile;
  profile["kind"] = to_string(instance.kind());
  if (const auto* p = std::get_if<AdditiveMatrix>(&instance.profile())) {
    json matrix = json::array();
    for (const auto& row : p->values) {
      json r = json::array();
      for (const auto& v : row) r.push_back(rational_to_json(v));
      matrix.push_back(r);
    }
    profile["matrix"] = matrix;
  } else if (const auto* p = std::get_if<IdenticalAdditive>(&instance.profile())) {
    json values = json::array();
    for (const auto& v : p->values) values.push_back(rational_to_json(v));
    profile["values"] = values;
  } else if (const auto* p = std::get_if<TwoValuable>(&instance.profile())) {
    profile["goods"] = instance.num_goods();
    json tables = json::array();
    for (const auto& t : p->tables) {
      json entry;
      entry["goods"] = t.goods;
      json single = json::array();
      for (const auto& v : t.single) single.push_back(rational_to_json(v));
      entry["single"] = single;
      if (t.goods.size() == 2) entry["pair"] = rational_to_json(t.pair);
      tables.push_back(entry);
    }
    profile["tables"] = tables;
  }
  doc["profile"] = profile;
  return doc;
}

std::string serialize_instance(const Instance& instance) { return instance_to_json(instance).dump(); }

Allocation allocation_from_json(const json& doc) {
  const json& bundles = require_array(doc, "bundles", "");
  Allocation out;
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (!bundles[i].is_array()) throw ParseError(idx("bundles", i), "expected an array");
    std::vector<GoodId> bundle;
    for (std::size_t k = 0; k < bundles[i].size(); ++k) {
      bundle.push_back(good_index(bundles[i][k], idx(idx("bundles", i), k)));
    }
    out.bundles.push_back(std::move(bundle));
  }
  return out;
}

Allocation parse_allocation(std::string_view text) { return allocation_from_json(parse_json(text)); }

json allocation_to_json(const Allocation& allocation) {
  json doc;
  doc["bundles"] = allocation.bundles;
  return doc;
}

std::string serialize_allocation(const Allocation& allocation) { return allocation_to_json(allocation).dump(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace nashw
