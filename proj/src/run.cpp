#include <algorithm>

#include "json.hpp"
#include "uiobs/report.hpp"
#include "uiobs/spec_io.hpp"

namespace uiobs {
namespace {

using nlohmann::json;

constexpr const char* kSchema = "uiobs-report/1";
constexpr int kSeparationOrders = 4;
constexpr int kIdentityOrder = 4;
constexpr int kStopExtra = 3;

SamplePlan plan_for(const RunConfig& c, const std::vector<double>& center) {
  SamplePlan plan = SamplePlan::around(center, c.box);
  plan.seed = c.seed;
  plan.samples = c.samples;
  plan.tol = c.tol;
  return plan;
}

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

json config_json(const RunConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"k", c.k},
          {"max_m", c.max_m < 0 ? json(nullptr) : json(c.max_m)},
          {"seed", c.seed},
          {"samples", c.samples},
          {"tol", c.tol},
          {"box", c.box},
          {"verify", c.verify},
          {"early_exit", c.early_exit}};
}

std::string overall(const std::vector<Verdict>& v) {
  if (std::all_of(v.begin(), v.end(), [](Verdict x) { return x == Verdict::Observable; })) return "OBSERVABLE";
  if (std::any_of(v.begin(), v.end(), [](Verdict x) { return x == Verdict::NotObservable; })) {
    return "NOT-OBSERVABLE";
  }
  return "UNDECIDED";
}

void add_stats(json& sampling, const SampleStats& s) {
  sampling["attempts"] = sampling.value("attempts", 0L) + s.attempts;
  sampling["rejected_domain"] = sampling.value("rejected_domain", 0L) + s.rejected_domain;
  sampling["rejected_guard"] = sampling.value("rejected_guard", 0L) + s.rejected_guard;
}

json verification_json(const SystemSpec& work, std::size_t output, const std::optional<int>& m_star,
                       const SamplePlan& plan) {
  json v;
  try {
    json sep = json::array();
    bool all = true;
    for (int m = 1; m <= kSeparationOrders; ++m) {
      for (const auto& c : separation_checks(work, m, plan)) {
        sep.push_back({{"output", c.output}, {"m", c.m}, {"equal", c.equal}, {"rank_bar", c.rank_bar},
                       {"rank_tilde", c.rank_tilde}});
        all = all && c.equal;
      }
    }
    v["separation"] = {{"passed", all && !sep.empty()}, {"checks", sep}};
  } catch (const Error& e) {
    v["separation"] = {{"passed", false}, {"error", e.what()}};
  }
  try {
    json ids = json::array();
    double worst = 0.0;
    for (const auto& r : verify_identities(work, kIdentityOrder, plan, output)) {
      for (double x : r.psi_phi) worst = std::max(worst, x);
      for (double x : r.key) worst = std::max(worst, x);
      ids.push_back({{"input", r.input}, {"samples", r.samples}, {"psi_phi", r.psi_phi}, {"key", r.key}});
    }
    v["identities"] = {{"j_max", kIdentityOrder}, {"max_residual", worst}, {"inputs", ids}};
  } catch (const Error& e) {
    v["identities"] = {{"error", e.what()}};
  }
  if (m_star) {
    try {
      auto same = verify_stop(work, *m_star, kStopExtra, plan, output);
      v["stop"] = {{"m_star", *m_star},
                   {"extra_steps", kStopExtra},
                   {"unchanged", same},
                   {"passed", std::all_of(same.begin(), same.end(), [](bool b) { return b; })}};
    } catch (const Error& e) {
      v["stop"] = {{"error", e.what()}};
    }
  } else {
    v["stop"] = nullptr;
  }
  return v;
}

void run_single(const SystemSpec& sys, const RunConfig& config, json& report) {
  AnalysisOptions options;
  options.plan = plan_for(config, sys.x0);
  options.max_m = config.max_m;
  options.early_exit = config.early_exit;
  AnalysisResult r = analyze(sys, options);

  const std::vector<std::string>& names = sys.space.names();
  json verdicts = json::array();
  for (std::size_t j = 0; j < sys.n(); ++j) {
    Certificate cert = r.certificate;
    if (r.status != Status::Done) cert = Certificate::None;
    std::string tag = to_string(cert);
    // Outside a completed run, observable components are justified by membership alone.
    if (r.status == Status::Undecided && r.verdicts[j] == Verdict::Observable) tag = "in-omega";
    verdicts.push_back({{"state", names[j]}, {"verdict", to_string(r.verdicts[j])}, {"certificate", tag}});
  }
  report["verdicts"] = verdicts;
  report["overall"] = overall(r.verdicts);
  report["status"] = to_string(r.status);
  report["exit_code"] = r.status == Status::Done        ? exit_code::ok
                        : r.status == Status::NotHandled ? exit_code::not_handled
                                                         : exit_code::undecided;

  json ranks = json::array();
  for (std::size_t m = 0; m < r.ranks.size(); ++m) {
    ranks.push_back({{"m", static_cast<int>(m) + r.order_offset}, {"rank", r.ranks[m]}});
  }
  json per_input = json::array();
  for (const auto& d : r.relative_degree_per_input) per_input.push_back(optional_int(d));
  report["single_ui"] = {
      {"primary_output", r.primary_output},
      {"L1", r.L1g},
      {"rho", r.rho},
      {"rho_zero", r.rho_zero},
      {"relative_degree", r.relative_degree},
      {"relative_degree_input", r.relative_degree > 1 ? json(r.relative_degree_input) : json(nullptr)},
      {"relative_degree_per_input", per_input},
      {"coordinate_change", r.coordinate_change_used},
      {"order_offset", r.order_offset},
      {"m_prime", optional_int(r.m_prime)},
      {"m_star", optional_int(r.m_star)},
      {"rank", r.rank},
      {"ranks", ranks},
      {"bound", r.bound},
      {"certificate", to_string(r.certificate)},
      {"transformed_system", r.transformed ? json::parse(spec_to_json(*r.transformed)) : json(nullptr)}};
  for (const auto& d : r.diagnostics) report["diagnostics"].push_back(d);
  add_stats(report["sampling"], r.stats);

  if (config.verify) {
    if (r.status == Status::NotHandled || r.certificate == Certificate::RelativeDegree) {
      report["verification"] = {{"applicable", false}, {"reason", "no single-input recursion was run"}};
    } else {
      const SystemSpec& work = r.transformed ? *r.transformed : sys;
      std::size_t output = r.transformed ? 0 : r.primary_output;
      std::optional<int> m_star;
      if (r.m_star) m_star = *r.m_star - r.order_offset;
      json v = verification_json(work, output, m_star, plan_for(config, work.x0));
      v["system"] = r.transformed ? "transformed" : "original";
      v["applicable"] = true;
      report["verification"] = v;
    }
  }
}

void run_eorc(const SystemSpec& sys, const RunConfig& config, json& report) {
  SamplePlan plan = plan_for(config, sys.x0);
  const bool orc = sys.m_w() == 0;
  const int cap = orc ? 0 : config.k;
  const std::vector<std::string>& names = sys.space.names();

  std::vector<std::optional<int>> first(sys.n());
  json orders = json::array();
  std::optional<int> k_used;
  SampleStats stats;
  for (int k = 0; k <= cap; ++k) {
    EorcOrder o = eorc_report(sys, k, plan, {}, &stats);
    json observable = json::array();
    for (std::size_t j = 0; j < sys.n(); ++j) {
      if (o.observable[j]) {
        observable.push_back(names[j]);
        if (!first[j]) first[j] = k;
      }
    }
    orders.push_back({{"k", k}, {"steps", o.steps}, {"rank", o.rank}, {"ranks", o.ranks},
                      {"extended_dim", sys.n() + static_cast<std::size_t>(k) * sys.m_w()},
                      {"observable", observable}});
    if (std::all_of(first.begin(), first.end(), [](const auto& v) { return v.has_value(); })) {
      k_used = k;
      break;
    }
  }

  std::vector<Verdict> verdicts(sys.n());
  json vj = json::array();
  for (std::size_t j = 0; j < sys.n(); ++j) {
    json entry{{"state", names[j]}};
    if (first[j]) {
      verdicts[j] = Verdict::Observable;
      entry["certificate"] = orc ? "orc" : "eorc";
      entry["k"] = *first[j];
    } else if (orc) {
      verdicts[j] = Verdict::NotObservable;
      entry["certificate"] = "orc";
      entry["k"] = 0;
    } else {
      verdicts[j] = Verdict::Undecided;
      entry["certificate"] = "none";
      entry["k"] = nullptr;
    }
    entry["verdict"] = to_string(verdicts[j]);
    vj.push_back(entry);
  }
  const bool decided = std::none_of(verdicts.begin(), verdicts.end(), [](Verdict v) { return v == Verdict::Undecided; });
  report["verdicts"] = vj;
  report["overall"] = overall(verdicts);
  report["status"] = decided ? "DONE" : "UNDECIDED";
  report["exit_code"] = decided ? exit_code::ok : exit_code::undecided;
  report["eorc"] = {{"orc", orc}, {"k_cap", cap}, {"k_used", optional_int(k_used)}, {"orders", orders}};
  if (orc) {
    report["diagnostics"].push_back("no unknown inputs: the recursion ran to stability (observability rank condition)");
  } else if (!decided) {
    report["diagnostics"].push_back("the extended rank condition is only sufficient; components not certified up to k = " +
                                    std::to_string(cap));
  }
  if (sys.m_w() == 1 && sys.has_drift()) {
    report["diagnostics"].push_back("one unknown input with drift: the single-input procedure does not apply");
  }
  add_stats(report["sampling"], stats);
  if (config.verify) {
    report["verification"] = {{"applicable", false}, {"reason", "checks apply to the single-input path"}};
  }
}

json base_report(const RunConfig& config) {
  json r;
  r["schema"] = kSchema;
  r["input"] = {{"spec", config.spec_path.empty() ? json(nullptr) : json(config.spec_path)},
                {"system", nullptr},
                {"config", config_json(config)}};
  r["path"] = nullptr;
  r["status"] = "ERROR";
  r["exit_code"] = exit_code::spec_error;
  r["overall"] = nullptr;
  r["verdicts"] = json::array();
  r["single_ui"] = nullptr;
  r["eorc"] = nullptr;
  r["diagnostics"] = json::array();
  r["sampling"] = {{"seed", config.seed}, {"samples", config.samples}, {"tol", config.tol}, {"box", config.box},
                   {"attempts", 0}, {"rejected_domain", 0}, {"rejected_guard", 0}};
  r["verification"] = nullptr;
  r["error"] = nullptr;
  return r;
}

Report finish(json& r) {
  Report out;
  out.exit_code = r["exit_code"].get<int>();
  out.json = r.dump(2) + "\n";
  out.text = render_text(out.json);
  return out;
}

void fail(json& r, const char* kind, int code, const std::exception& e) {
  r["status"] = "ERROR";
  r["exit_code"] = code;
  r["error"] = {{"kind", kind}, {"message", e.what()}};
}

Report analyze_into(json& report, const SystemSpec& sys, const RunConfig& config) {
  try {
    config.validate();
    sys.validate();
    report["input"]["system"] = json::parse(spec_to_json(sys));
    bool single = false;
    switch (config.mode) {
      case Mode::Auto: single = sys.m_w() == 1 && !sys.has_drift(); break;
      case Mode::Single:
        if (sys.m_w() != 1) {
          throw SpecError("mode single needs exactly one unknown input; the system has " +
                          std::to_string(sys.m_w()));
        }
        if (sys.has_drift()) throw SpecError("mode single needs f0 = 0");
        single = true;
        break;
      case Mode::Eorc: single = false; break;
    }
    report["path"] = single ? "single" : "eorc";
    if (single) {
      run_single(sys, config, report);
    } else {
      run_eorc(sys, config, report);
    }
  } catch (const SamplingError& e) {
    fail(report, "sampling", exit_code::sampling_error, e);
  } catch (const DomainError& e) {
    fail(report, "sampling", exit_code::sampling_error, e);
  } catch (const Error& e) {
    fail(report, "spec", exit_code::spec_error, e);
  }
  return finish(report);
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Auto: return "auto";
    case Mode::Eorc: return "eorc";
    case Mode::Single: return "single";
  }
  return "auto";
}

std::optional<Mode> parse_mode(const std::string& s) {
  if (s == "auto") return Mode::Auto;
  if (s == "eorc") return Mode::Eorc;
  if (s == "single") return Mode::Single;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (k < 0 || k > max_k) throw SpecError("--k must be between 0 and " + std::to_string(max_k));
  if (max_m < -1) throw SpecError("--max-m must be non-negative");
  if (samples < 1) throw SpecError("--samples must be positive");
  if (!(tol > 0) || tol >= 1) throw SpecError("--tol must be in (0, 1)");
  if (!(box > 0)) throw SpecError("--box must be positive");
}

Report run(const RunConfig& config) {
  json report = base_report(config);
  SystemSpec sys;
  try {
    config.validate();
    sys = load_spec(config.spec_path);
  } catch (const Error& e) {
    fail(report, "spec", exit_code::spec_error, e);
    return finish(report);
  }
  return analyze_into(report, sys, config);
}

Report run(const SystemSpec& sys, const RunConfig& config) {
  json report = base_report(config);
  return analyze_into(report, sys, config);
}

}  // namespace uiobs
