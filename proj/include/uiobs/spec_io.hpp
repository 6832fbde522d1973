#pragma once

#include <string>
#include <string_view>

#include "uiobs/system.hpp"

namespace uiobs {

/// Reads a system description from a JSON document:
///
///   {
///     "states": ["r", "phi", "theta"],
///     "f0": ["0", "0", "0"],                      optional, zero by default
///     "f": [["0", "0", "1"]],                     known-input fields
///     "g": [["cos(theta - phi)", ...]],           unknown-input fields
///     "unknown_inputs": ["v"],                    optional names for g
///     "outputs": ["r"],
///     "x0": [2.0, 0.3, 0.9],
///     "coordinate_change": {                      optional
///       "states": ["x1'", "x2'", "x3'"],          optional, x1'..xn' by default
///       "Q": [...], "Q_inverse": [...]
///     }
///   }
///
/// Expressions may be strings or numbers. "name" and "description" are
/// accepted and ignored. Errors name the offending field, e.g.
/// "outputs[0]: unknown identifier "q" at position 4".
SystemSpec parse_spec(std::string_view json_text);

/// parse_spec on the contents of `path`; the path prefixes error messages.
SystemSpec load_spec(const std::string& path);

/// The spec in the JSON layout above, with canonical expression text.
std::string spec_to_json(const SystemSpec& sys);

}  // namespace uiobs
