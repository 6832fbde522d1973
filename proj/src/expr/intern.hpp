#pragma once

#include "uiobs/expr.hpp"

namespace uiobs {

/// Returns the unique node structurally equal to `node`, creating it if needed.
/// Fills in arity, var_mask and hash.
Expr intern(Node&& node);

}  // namespace uiobs
