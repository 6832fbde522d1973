#include <algorithm>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "uiobs/report.hpp"

namespace uiobs {
namespace {

using nlohmann::json;

// Scalars print the way they appear in the JSON document.
std::string value(const json& v) {
  if (v.is_null()) return "-";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string join(const json& arr, const std::string& sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < arr.size(); ++i) out += (i ? sep : "") + value(arr[i]);
  return out;
}

void system_section(std::ostream& os, const json& sys, const std::string& title) {
  os << title << "\n";
  os << "  states: " << join(sys["states"]) << "\n";
  os << "  f0: [" << join(sys["f0"], ", ") << "]\n";
  for (std::size_t i = 0; i < sys["f"].size(); ++i) os << "  f" << i + 1 << ": [" << join(sys["f"][i], ", ") << "]\n";
  for (std::size_t j = 0; j < sys["g"].size(); ++j) {
    std::string name = sys.contains("unknown_inputs") ? value(sys["unknown_inputs"][j]) : "";
    os << "  g" << j + 1 << (name.empty() ? "" : " (" + name + ")") << ": [" << join(sys["g"][j], ", ") << "]\n";
  }
  for (std::size_t l = 0; l < sys["outputs"].size(); ++l) os << "  h" << l + 1 << ": " << value(sys["outputs"][l]) << "\n";
  os << "  x0: [" << join(sys["x0"], ", ") << "]\n";
  if (sys.contains("coordinate_change")) {
    const json& c = sys["coordinate_change"];
    os << "  coordinate change to " << join(c["states"]) << "\n";
    os << "    Q: [" << join(c["Q"], ", ") << "]\n";
    os << "    Q_inverse: [" << join(c["Q_inverse"], ", ") << "]\n";
  }
}

void single_section(std::ostream& os, const json& s) {
  os << "single-input analysis\n";
  os << "  primary output: h" << s["primary_output"].get<int>() + 1 << "\n";
  os << "  relative degree: " << value(s["relative_degree"]);
  if (!s["relative_degree_input"].is_null()) os << " along f" << s["relative_degree_input"].get<int>() + 1;
  if (!s["relative_degree_per_input"].empty()) os << " (per input: " << join(s["relative_degree_per_input"]) << ")";
  os << "\n";
  os << "  coordinate change: " << (s["coordinate_change"].get<bool>() ? "yes" : "no")
     << ", order offset " << value(s["order_offset"]) << "\n";
  os << "  L1 = " << value(s["L1"]) << "\n";
  os << "  rho = " << value(s["rho"]) << (s["rho_zero"].get<bool>() ? "  (identically zero)" : "") << "\n";
  os << "  m' = " << value(s["m_prime"]) << ", m* = " << value(s["m_star"]) << ", rank = " << value(s["rank"])
     << ", bound 2n+2 = " << value(s["bound"]) << ", certificate: " << value(s["certificate"]) << "\n";
  os << "  ranks:";
  for (const auto& r : s["ranks"]) os << " m=" << value(r["m"]) << ":" << value(r["rank"]);
  os << "\n";
  if (!s["transformed_system"].is_null()) system_section(os, s["transformed_system"], "  transformed system");
}

void eorc_section(std::ostream& os, const json& e) {
  os << (e["orc"].get<bool>() ? "observability rank condition\n" : "extended observability rank condition\n");
  os << "  k cap: " << value(e["k_cap"]) << ", k used: " << value(e["k_used"]) << "\n";
  for (const auto& o : e["orders"]) {
    os << "  k=" << value(o["k"]) << ": dim " << value(o["extended_dim"]) << ", steps " << value(o["steps"])
       << ", rank " << value(o["rank"]) << ", ranks [" << join(o["ranks"], ", ") << "], observable: "
       << (o["observable"].empty() ? "-" : join(o["observable"])) << "\n";
  }
}

void verification_section(std::ostream& os, const json& v) {
  os << "verification\n";
  if (!v.value("applicable", false)) {
    os << "  not applicable: " << value(v["reason"]) << "\n";
    return;
  }
  os << "  system: " << value(v["system"]) << "\n";
  const json& sep = v["separation"];
  os << "  separation: " << (sep["passed"].get<bool>() ? "passed" : "FAILED");
  if (sep.contains("error")) os << " (" << value(sep["error"]) << ")";
  os << "\n";
  if (sep.contains("checks")) {
    for (const auto& c : sep["checks"]) {
      os << "    h" << c["output"].get<int>() + 1 << " m=" << value(c["m"]) << ": equal " << value(c["equal"])
         << ", rank " << value(c["rank_bar"]) << " vs " << value(c["rank_tilde"]) << "\n";
    }
  }
  const json& ids = v["identities"];
  if (ids.contains("error")) {
    os << "  identities: error (" << value(ids["error"]) << ")\n";
  } else {
    os << "  identities up to j=" << value(ids["j_max"]) << ": max residual " << value(ids["max_residual"]) << "\n";
    for (const auto& r : ids["inputs"]) {
      os << "    f" << r["input"].get<int>() + 1 << " (" << value(r["samples"]) << " samples): psi/phi ["
         << join(r["psi_phi"], ", ") << "], key [" << join(r["key"], ", ") << "]\n";
    }
  }
  const json& stop = v["stop"];
  if (stop.is_null()) {
    os << "  stop: not run (no m*)\n";
  } else if (stop.contains("error")) {
    os << "  stop: error (" << value(stop["error"]) << ")\n";
  } else {
    os << "  stop: Omega_{m*+p} = Omega_{m*} for p=1.." << value(stop["extra_steps"]) << ": ["
       << join(stop["unchanged"], ", ") << "] " << (stop["passed"].get<bool>() ? "passed" : "FAILED") << "\n";
  }
}

}  // namespace

std::string render_text(const std::string& report_json) {
  json r = json::parse(report_json);
  std::ostringstream os;
  const json& input = r["input"];
  os << "uiobs report (" << value(r["schema"]) << ")\n";
  os << "spec: " << value(input["spec"]) << "\n";
  const json& c = input["config"];
  os << "config: mode " << value(c["mode"]) << ", k " << value(c["k"]) << ", max-m " << value(c["max_m"])
     << ", verify " << value(c["verify"]) << ", early-exit " << value(c["early_exit"]) << "\n";
  if (!input["system"].is_null()) system_section(os, input["system"], "system");

  os << "path: " << value(r["path"]) << "\n";
  os << "status: " << value(r["status"]) << " (exit " << value(r["exit_code"]) << ")\n";
  if (!r["error"].is_null()) os << "error (" << value(r["error"]["kind"]) << "): " << value(r["error"]["message"]) << "\n";
  if (!r["overall"].is_null()) os << "state: " << value(r["overall"]) << "\n";

  if (!r["verdicts"].empty()) {
    std::size_t width = 5;
    for (const auto& v : r["verdicts"]) width = std::max(width, value(v["state"]).size());
    os << "verdicts\n";
    for (const auto& v : r["verdicts"]) {
      os << "  " << std::left << std::setw(static_cast<int>(width)) << value(v["state"]) << "  " << std::setw(14)
         << value(v["verdict"]) << "  " << value(v["certificate"]);
      if (v.contains("k") && !v["k"].is_null()) os << " k=" << value(v["k"]);
      os << "\n";
    }
  }
  if (!r["single_ui"].is_null()) single_section(os, r["single_ui"]);
  if (!r["eorc"].is_null()) eorc_section(os, r["eorc"]);

  if (!r["diagnostics"].empty()) {
    os << "diagnostics\n";
    for (const auto& d : r["diagnostics"]) os << "  - " << value(d) << "\n";
  }
  const json& s = r["sampling"];
  os << "sampling: seed " << value(s["seed"]) << ", " << value(s["samples"]) << " samples, tol " << value(s["tol"])
     << ", box " << value(s["box"]) << ", " << value(s["attempts"]) << " candidates, " << value(s["rejected_domain"])
     << " rejected (domain), " << value(s["rejected_guard"]) << " rejected (guard)\n";
  if (!r["verification"].is_null()) verification_section(os, r["verification"]);
  return os.str();
}

}  // namespace uiobs
