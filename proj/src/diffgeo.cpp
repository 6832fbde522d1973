#include "uiobs/diffgeo.hpp"

namespace uiobs {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

void require_within(const Expr& e, std::size_t n, const char* what) {
  if (e.arity() > n) {
    throw DimensionError(std::string(what) + ": expression references variable index " +
                         std::to_string(e.arity() - 1) + " in a space of dimension " + std::to_string(n));
  }
}

void require_within(const std::vector<Expr>& v, std::size_t n, const char* what) {
  for (const auto& e : v) require_within(e, n, what);
}

// Jacobian-vector product (dv/dx) f.
VectorField directional(const VectorField& v, const VectorField& f) {
  VectorField out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::vector<std::pair<Number, Expr>> terms;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i].is_zero() || !v[k].may_depend_on(i)) continue;
      terms.emplace_back(Number(1), mul(differentiate(v[k], i), f[i]));
    }
    out[k] = sum(terms);
  }
  return out;
}

}  // namespace

Covector gradient(const Expr& h, std::size_t n) {
  require_within(h, n, "gradient");
  Covector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = differentiate(h, i);
  return out;
}

Covector gradient(const Expr& h, const VarSpace& space) { return gradient(h, space.size()); }

Expr lie_scalar(const VectorField& f, const Expr& h) {
  require_within(h, f.size(), "lie_scalar");
  std::vector<std::pair<Number, Expr>> terms;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].is_zero() || !h.may_depend_on(i)) continue;
    terms.emplace_back(Number(1), mul(differentiate(h, i), f[i]));
  }
  return sum(terms);
}

VectorField lie_bracket(const VectorField& f, const VectorField& g) {
  require_same_length(f.size(), g.size(), "lie_bracket");
  require_within(f, f.size(), "lie_bracket");
  require_within(g, g.size(), "lie_bracket");
  return directional(g, f) - directional(f, g);
}

Covector lie_covector(const VectorField& f, const Covector& omega) {
  require_same_length(f.size(), omega.size(), "lie_covector");
  require_within(f, f.size(), "lie_covector");
  require_within(omega, omega.size(), "lie_covector");
  const std::size_t n = f.size();
  Covector out(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::pair<Number, Expr>> terms;
    for (std::size_t i = 0; i < n; ++i) {
      if (!f[i].is_zero() && omega[j].may_depend_on(i)) {
        terms.emplace_back(Number(1), mul(f[i], differentiate(omega[j], i)));
      }
      if (!omega[i].is_zero() && f[i].may_depend_on(j)) {
        terms.emplace_back(Number(1), mul(omega[i], differentiate(f[i], j)));
      }
    }
    out[j] = sum(terms);
  }
  return out;
}

VectorField scaled(const VectorField& f, const Expr& c) {
  VectorField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = mul(c, f[i]);
  return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_length(a.size(), b.size(), "vector field sum");
  VectorField out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = add(a[i], b[i]);
  return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_length(a.size(), b.size(), "vector field difference");
  VectorField out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = sub(a[i], b[i]);
  return out;
}

}  // namespace uiobs
