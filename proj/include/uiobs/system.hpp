#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uiobs/diffgeo.hpp"

namespace uiobs {

/// User-supplied local coordinates x' = Q(x) with inverse x = Q_inverse(x').
/// Q lives over the original states, Q_inverse over `space`.
struct CoordinateMap {
  VarSpace space;
  std::vector<Expr> Q;
  std::vector<Expr> Q_inverse;
};

/// Control-affine system
///   dx/dt = f0(x) + sum_i f_i(x) u_i + sum_j g_j(x) w_j,   y_l = h_l(x)
/// with known inputs u and unknown inputs w.
struct SystemSpec {
  VarSpace space;
  VectorField f0;
  std::vector<VectorField> f;  // known-input fields
  std::vector<VectorField> g;  // unknown-input fields
  std::vector<Expr> outputs;
  std::vector<double> x0;
  std::optional<CoordinateMap> coordinate_change;
  /// Functions already known to be observable; they seed the single-input
  /// codistribution together with the outputs.
  std::vector<Expr> observable_seeds;
  /// Names of the unknown inputs; w1, w2, ... when empty.
  std::vector<std::string> unknown_input_names;

  std::size_t n() const noexcept { return space.size(); }
  std::size_t m_u() const noexcept { return f.size(); }
  std::size_t m_w() const noexcept { return g.size(); }

  bool has_drift() const;
  std::string unknown_input_name(std::size_t j) const;
  /// Throws SpecError/DimensionError on inconsistent dimensions.
  void validate() const;
};

/// Builds a field from expression strings over `space`.
VectorField parse_field(const std::vector<std::string>& entries, const VarSpace& space);

}  // namespace uiobs
