#include <cmath>

#include "uiobs/system.hpp"

namespace uiobs {
namespace {

void check_field(const VectorField& v, std::size_t n, const std::string& what) {
  if (v.size() != n) {
    throw DimensionError(what + " has " + std::to_string(v.size()) + " entries but the system has " +
                         std::to_string(n) + " states");
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].arity() > n) throw DimensionError(what + "[" + std::to_string(i) + "] references an unknown variable");
  }
}

}  // namespace

bool SystemSpec::has_drift() const {
  for (const auto& e : f0) {
    if (!e.is_zero()) return true;
  }
  return false;
}

std::string SystemSpec::unknown_input_name(std::size_t j) const {
  if (j < unknown_input_names.size()) return unknown_input_names[j];
  return "w" + std::to_string(j + 1);
}

void SystemSpec::validate() const {
  const std::size_t n = space.size();
  if (n == 0) throw SpecError("system has no states");
  check_field(f0, n, "f0");
  for (std::size_t i = 0; i < f.size(); ++i) check_field(f[i], n, "f[" + std::to_string(i) + "]");
  for (std::size_t j = 0; j < g.size(); ++j) check_field(g[j], n, "g[" + std::to_string(j) + "]");
  if (outputs.empty()) throw SpecError("system has no outputs");
  for (std::size_t l = 0; l < outputs.size(); ++l) {
    if (outputs[l].arity() > n) throw DimensionError("outputs[" + std::to_string(l) + "] references an unknown variable");
  }
  for (const auto& s : observable_seeds) {
    if (s.arity() > n) throw DimensionError("observable seed references an unknown variable");
  }
  if (x0.size() != n) {
    throw DimensionError("x0 has " + std::to_string(x0.size()) + " entries but the system has " +
                         std::to_string(n) + " states");
  }
  for (double v : x0) {
    if (!std::isfinite(v)) throw SpecError("x0 entries must be finite");
  }
  if (!unknown_input_names.empty() && unknown_input_names.size() != g.size()) {
    throw SpecError("unknown_inputs names " + std::to_string(unknown_input_names.size()) +
                    " inputs but g has " + std::to_string(g.size()) + " fields");
  }
  if (coordinate_change) {
    const auto& c = *coordinate_change;
    if (c.space.size() != n) throw DimensionError("coordinate_change must introduce exactly n new coordinates");
    if (c.Q.size() != n) throw DimensionError("coordinate_change.Q must have n entries");
    if (c.Q_inverse.size() != n) throw DimensionError("coordinate_change.Q_inverse must have n entries");
    for (const auto& e : c.Q) {
      if (e.arity() > n) throw DimensionError("coordinate_change.Q references an unknown variable");
    }
    for (const auto& e : c.Q_inverse) {
      if (e.arity() > n) throw DimensionError("coordinate_change.Q_inverse references an unknown variable");
    }
  }
}

VectorField parse_field(const std::vector<std::string>& entries, const VarSpace& space) {
  VectorField out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(simplify(parse_expr(e, space)));
  return out;
}

}  // namespace uiobs
