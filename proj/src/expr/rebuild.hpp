#pragma once

#include <functional>
#include <unordered_map>

#include "uiobs/expr.hpp"

namespace uiobs::detail {

/// Rebuilds `e` bottom-up, replacing each variable by `leaf(index)`. Canonical
/// nodes are always rebuilt through the canonicalizing constructors; raw nodes
/// only when `canonicalize` is set.
Expr rebuild(const Expr& e, const std::function<Expr(std::uint32_t)>& leaf, bool canonicalize,
             std::unordered_map<const Node*, Expr>& memo);

}  // namespace uiobs::detail
