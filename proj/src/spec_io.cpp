#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uiobs/spec_io.hpp"

namespace uiobs {
namespace {

using nlohmann::json;

std::string at(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const char* key, const std::string& where = "") {
  auto it = obj.find(key);
  if (it == obj.end()) throw SpecError(where + key + ": missing");
  return *it;
}

const json& require_array(const json& v, const std::string& field) {
  if (!v.is_array()) throw SpecError(field + ": expected an array");
  return v;
}

Expr expression(const json& v, const VarSpace& space, const std::string& field) {
  std::string text;
  if (v.is_string()) {
    text = v.get<std::string>();
  } else if (v.is_number_integer()) {
    text = std::to_string(v.get<long long>());
  } else if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    text = os.str();
  } else {
    throw SpecError(field + ": expected an expression string or a number");
  }
  try {
    return simplify(parse_expr(text, space));
  } catch (const Error& e) {
    throw SpecError(field + ": " + e.what());
  }
}

std::vector<Expr> expressions(const json& v, const VarSpace& space, const std::string& field) {
  require_array(v, field);
  std::vector<Expr> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(expression(v[i], space, at(field, i)));
  return out;
}

VectorField field_of(const json& v, const VarSpace& space, const std::string& field) {
  VectorField out = expressions(v, space, field);
  if (out.size() != space.size()) {
    throw DimensionError(field + ": has " + std::to_string(out.size()) + " entries but the system has " +
                         std::to_string(space.size()) + " states");
  }
  return out;
}

std::vector<std::string> names(const json& v, const std::string& field) {
  require_array(v, field);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw SpecError(at(field, i) + ": expected a name");
    std::string name = v[i].get<std::string>();
    // A name must read back as a single identifier.
    bool ok = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
    for (char c : name) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'');
    if (!ok) throw SpecError(at(field, i) + ": \"" + name + "\" is not a valid identifier");
    if (!seen.insert(name).second) throw SpecError(at(field, i) + ": duplicate name \"" + name + "\"");
    out.push_back(name);
  }
  return out;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw SpecError(where + item.key() + ": unknown field");
  }
}

json field_json(const VectorField& v, const VarSpace& space) {
  json out = json::array();
  for (const auto& e : v) out.push_back(to_string(e, space));
  return out;
}

}  // namespace

SystemSpec parse_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("spec must be a JSON object");
  reject_unknown_keys(doc,
                      {"name", "description", "states", "f0", "f", "g", "unknown_inputs", "outputs", "x0",
                       "coordinate_change"},
                      "");

  SystemSpec sys;
  sys.space = VarSpace(names(require(doc, "states"), "states"));
  if (sys.space.size() == 0) throw SpecError("states: at least one state is required");
  const std::size_t n = sys.space.size();

  if (doc.contains("f0")) {
    sys.f0 = field_of(doc["f0"], sys.space, "f0");
  } else {
    sys.f0 = VectorField(n, constant(0));
  }
  const json f = require_array(doc.value("f", json::array()), "f");
  for (std::size_t i = 0; i < f.size(); ++i) sys.f.push_back(field_of(f[i], sys.space, at("f", i)));
  const json g = require_array(doc.value("g", json::array()), "g");
  for (std::size_t j = 0; j < g.size(); ++j) sys.g.push_back(field_of(g[j], sys.space, at("g", j)));
  if (doc.contains("unknown_inputs")) sys.unknown_input_names = names(doc["unknown_inputs"], "unknown_inputs");

  sys.outputs = expressions(require(doc, "outputs"), sys.space, "outputs");
  if (sys.outputs.empty()) throw SpecError("outputs: at least one output is required");

  const json& x0 = require_array(require(doc, "x0"), "x0");
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!x0[i].is_number()) throw SpecError(at("x0", i) + ": expected a number");
    sys.x0.push_back(x0[i].get<double>());
  }

  if (doc.contains("coordinate_change")) {
    const json& c = doc["coordinate_change"];
    if (!c.is_object()) throw SpecError("coordinate_change: expected an object");
    reject_unknown_keys(c, {"states", "Q", "Q_inverse"}, "coordinate_change.");
    CoordinateMap map;
    if (c.contains("states")) {
      map.space = VarSpace(names(c["states"], "coordinate_change.states"));
    } else {
      std::vector<std::string> fresh;
      for (std::size_t i = 0; i < n; ++i) fresh.push_back("x" + std::to_string(i + 1) + "'");
      map.space = VarSpace(fresh);
    }
    if (map.space.size() != n) {
      throw DimensionError("coordinate_change.states: expected " + std::to_string(n) + " names");
    }
    map.Q = field_of(require(c, "Q", "coordinate_change."), sys.space, "coordinate_change.Q");
    map.Q_inverse =
        field_of(require(c, "Q_inverse", "coordinate_change."), map.space, "coordinate_change.Q_inverse");
    sys.coordinate_change = std::move(map);
  }

  sys.validate();
  return sys;
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_spec(buf.str());
  } catch (const DimensionError& e) {
    throw DimensionError(path + ": " + e.what());
  } catch (const SpecError& e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::string spec_to_json(const SystemSpec& sys) {
  json doc;
  doc["states"] = sys.space.names();
  doc["f0"] = field_json(sys.f0, sys.space);
  doc["f"] = json::array();
  for (const auto& fi : sys.f) doc["f"].push_back(field_json(fi, sys.space));
  doc["g"] = json::array();
  for (const auto& gj : sys.g) doc["g"].push_back(field_json(gj, sys.space));
  if (!sys.unknown_input_names.empty()) doc["unknown_inputs"] = sys.unknown_input_names;
  doc["outputs"] = field_json(sys.outputs, sys.space);
  doc["x0"] = sys.x0;
  if (sys.coordinate_change) {
    const auto& c = *sys.coordinate_change;
    doc["coordinate_change"] = {{"states", c.space.names()},
                                {"Q", field_json(c.Q, sys.space)},
                                {"Q_inverse", field_json(c.Q_inverse, c.space)}};
  }
  return doc.dump(2);
}

}  // namespace uiobs
