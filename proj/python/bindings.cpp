#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uiobs/report.hpp"
#include "uiobs/spec_io.hpp"

namespace py = pybind11;

namespace {

uiobs::RunConfig make_config(const std::string& mode, int k, std::optional<int> max_m, std::uint64_t seed,
                             int samples, double tol, double box, bool verify, bool early_exit) {
  uiobs::RunConfig c;
  auto m = uiobs::parse_mode(mode);
  if (!m) throw uiobs::SpecError("mode must be auto, eorc or single");
  c.mode = *m;
  c.k = k;
  c.max_m = max_m.value_or(-1);
  c.seed = seed;
  c.samples = samples;
  c.tol = tol;
  c.box = box;
  c.verify = verify;
  c.early_exit = early_exit;
  return c;
}

uiobs::VarSpace space_of(const std::vector<std::string>& states) { return uiobs::VarSpace(states); }

uiobs::VectorField field_of(const std::vector<std::string>& entries, const uiobs::VarSpace& space) {
  if (entries.size() != space.size()) throw uiobs::DimensionError("field length differs from the number of states");
  return uiobs::parse_field(entries, space);
}

std::vector<std::string> printed(const uiobs::VectorField& v, const uiobs::VarSpace& space) {
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(uiobs::to_string(e, space));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Observability analysis of control-affine systems with unknown inputs";

  auto error = py::register_exception<uiobs::Error>(m, "Error");
  py::register_exception<uiobs::SpecError>(m, "SpecError", error);
  py::register_exception<uiobs::ParseError>(m, "ParseError", error);
  py::register_exception<uiobs::UnknownIdentifier>(m, "UnknownIdentifier", error);
  py::register_exception<uiobs::DimensionError>(m, "DimensionError", error);
  py::register_exception<uiobs::DomainError>(m, "DomainError", error);
  py::register_exception<uiobs::SamplingError>(m, "SamplingError", error);

#define UIOBS_RUN_ARGS                                                                                   \
  py::kw_only(), py::arg("mode") = "auto", py::arg("k") = 4, py::arg("max_m") = py::none(),              \
      py::arg("seed") = 42, py::arg("samples") = 7, py::arg("tol") = 1e-8, py::arg("box") = 0.3,         \
      py::arg("verify") = false, py::arg("early_exit") = false

  m.def(
      "analyze_file",
      [](const std::string& path, const std::string& mode, int k, std::optional<int> max_m, std::uint64_t seed,
         int samples, double tol, double box, bool verify, bool early_exit) {
        uiobs::RunConfig c = make_config(mode, k, max_m, seed, samples, tol, box, verify, early_exit);
        c.spec_path = path;
        uiobs::Report r;
        {
          py::gil_scoped_release release;
          r = uiobs::run(c);
        }
        return py::make_tuple(r.exit_code, r.json);
      },
      py::arg("path"), UIOBS_RUN_ARGS, "Analyze a JSON spec file; returns (exit_code, report_json).");

  m.def(
      "analyze_text",
      [](const std::string& spec_json, const std::string& mode, int k, std::optional<int> max_m,
         std::uint64_t seed, int samples, double tol, double box, bool verify, bool early_exit) {
        uiobs::RunConfig c = make_config(mode, k, max_m, seed, samples, tol, box, verify, early_exit);
        uiobs::SystemSpec sys = uiobs::parse_spec(spec_json);
        uiobs::Report r;
        {
          py::gil_scoped_release release;
          r = uiobs::run(sys, c);
        }
        return py::make_tuple(r.exit_code, r.json);
      },
      py::arg("spec_json"), UIOBS_RUN_ARGS,
      "Analyze a spec given as JSON text; returns (exit_code, report_json). Invalid specs raise SpecError.");
#undef UIOBS_RUN_ARGS

  m.def("render_text", &uiobs::render_text, py::arg("report_json"));
  m.def("normalize_spec", [](const std::string& text) { return uiobs::spec_to_json(uiobs::parse_spec(text)); },
        py::arg("spec_json"), "Parse, validate and re-emit a spec with canonical expressions.");

  m.def(
      "simplify",
      [](const std::string& expr, const std::vector<std::string>& states) {
        auto space = space_of(states);
        return uiobs::to_string(uiobs::simplify(uiobs::parse_expr(expr, space)), space);
      },
      py::arg("expr"), py::arg("states"));
  m.def(
      "differentiate",
      [](const std::string& expr, const std::string& var, const std::vector<std::string>& states) {
        auto space = space_of(states);
        auto index = space.index_of(var);
        if (!index) throw uiobs::UnknownIdentifier(var, 0);
        return uiobs::to_string(uiobs::differentiate(uiobs::parse_expr(expr, space), *index), space);
      },
      py::arg("expr"), py::arg("var"), py::arg("states"));
  m.def(
      "evaluate",
      [](const std::string& expr, const std::vector<std::string>& states, const std::vector<double>& point) {
        auto space = space_of(states);
        return uiobs::evaluate(uiobs::parse_expr(expr, space), space, point);
      },
      py::arg("expr"), py::arg("states"), py::arg("point"));
  m.def(
      "lie_derivative",
      [](const std::vector<std::string>& field, const std::string& h, const std::vector<std::string>& states) {
        auto space = space_of(states);
        return uiobs::to_string(uiobs::lie_scalar(field_of(field, space), uiobs::parse_expr(h, space)), space);
      },
      py::arg("field"), py::arg("h"), py::arg("states"));
  m.def(
      "lie_bracket",
      [](const std::vector<std::string>& f, const std::vector<std::string>& g, const std::vector<std::string>& states) {
        auto space = space_of(states);
        return printed(uiobs::lie_bracket(field_of(f, space), field_of(g, space)), space);
      },
      py::arg("f"), py::arg("g"), py::arg("states"));

  m.attr("EXIT_OK") = uiobs::exit_code::ok;
  m.attr("EXIT_SPEC_ERROR") = uiobs::exit_code::spec_error;
  m.attr("EXIT_SAMPLING_ERROR") = uiobs::exit_code::sampling_error;
  m.attr("EXIT_UNDECIDED") = uiobs::exit_code::undecided;
  m.attr("EXIT_NOT_HANDLED") = uiobs::exit_code::not_handled;
}
