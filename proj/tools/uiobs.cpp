#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "uiobs/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Observability analysis of control-affine systems with unknown inputs"};
  app.require_subcommand(1);

  uiobs::RunConfig config;
  std::string mode = "auto";
  std::string format = "text";
  CLI::App* analyze = app.add_subcommand("analyze", "Analyze the system described by a JSON spec file");
  analyze->add_option("spec", config.spec_path, "Path to the system spec (JSON)")->required();
  analyze->add_option("--mode", mode, "Pipeline: auto, eorc or single")
      ->check(CLI::IsMember({"auto", "eorc", "single"}))
      ->default_str("auto");
  analyze->add_option("--k", config.k, "Largest extension order tried on the EORC path")->default_val(4);
  analyze->add_option("--max-m", config.max_m, "Largest order of the single-input recursion (default 2n + 2)");
  analyze->add_option("--seed", config.seed, "Seed of the sample-point generator")->default_val(42);
  analyze->add_option("--samples", config.samples, "Sample points per rank test")->default_val(7);
  analyze->add_option("--tol", config.tol, "Relative singular-value tolerance")->default_val(1e-8);
  analyze->add_option("--box", config.box, "Half-width of the sampling box around x0")->default_val(0.3);
  analyze->add_option("--format", format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->default_str("text");
  analyze->add_flag("--verify", config.verify, "Also run the separation, identity and stop checks");
  analyze->add_flag("--early-exit", config.early_exit,
                    "Single-input path: stop once the rank is n - 1 and d rho is still outside");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : uiobs::exit_code::spec_error;
  }

  config.mode = *uiobs::parse_mode(mode);
  config.format = format == "json" ? uiobs::Format::Json : uiobs::Format::Text;
  try {
    uiobs::Report report = uiobs::run(config);
    std::cout << report.formatted(config.format);
    if (report.exit_code == uiobs::exit_code::spec_error || report.exit_code == uiobs::exit_code::sampling_error) {
      std::cerr << "uiobs: analysis failed, see the error field of the report\n";
    }
    return report.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "uiobs: internal error: " << e.what() << "\n";
    return 1;
  }
}
