#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "uiobs/single_ui.hpp"

namespace uiobs {

namespace exit_code {
constexpr int ok = 0;
constexpr int spec_error = 2;
constexpr int sampling_error = 3;
constexpr int undecided = 4;
constexpr int not_handled = 5;
}  // namespace exit_code

enum class Mode { Auto, Eorc, Single };
enum class Format { Text, Json };

std::string to_string(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

struct RunConfig {
  std::string spec_path;
  Mode mode = Mode::Auto;
  int k = 4;       // largest EORC order tried
  int max_m = -1;  // single-input order cap; -1 means 2n + 2
  std::uint64_t seed = 42;
  int samples = 7;
  double tol = 1e-8;
  double box = 0.3;  // half-width of the sampling box around x0
  bool verify = false;
  bool early_exit = false;
  Format format = Format::Text;

  static constexpr int max_k = 12;

  /// Throws SpecError on out-of-range values.
  void validate() const;
};

/// Outcome of one analysis. `json` is the structured report; `text` is
/// rendered from it.
struct Report {
  int exit_code = exit_code::ok;
  std::string json;
  std::string text;

  const std::string& formatted(Format f) const { return f == Format::Json ? json : text; }
};

/// Loads config.spec_path and analyzes it. Errors become reports with a
/// nonzero exit code; only non-library exceptions propagate.
Report run(const RunConfig& config);

/// Same on an in-memory system; config.spec_path is only echoed.
Report run(const SystemSpec& sys, const RunConfig& config);

/// Human-readable rendering of a structured report.
std::string render_text(const std::string& report_json);

}  // namespace uiobs
