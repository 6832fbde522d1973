#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uiobs/augment.hpp"

namespace uiobs {

/// L1 = L_g h vanishes on the sampling box; the caller must change coordinates.
class CoordinateChangeRequired : public Error {
 public:
  using Error::Error;
};

struct RhoData {
  Expr L1g;  // L_g h
  Expr L2g;  // L_g L_g h
  Expr rho;  // L2g / L1g^2
  Covector d_rho;
};

/// Requires exactly one unknown input.
RhoData rho_data(const SystemSpec& sys, std::size_t output = 0);

/// For each known input i, the fields phi^i_0 .. phi^i_m with
/// phi^i_0 = f_i and phi^i_k = [phi^i_{k-1}, g] / L1.
std::vector<std::vector<VectorField>> phi_sequence(const SystemSpec& sys, int m, std::size_t output = 0);

/// True when `e` is zero (to rounding) at every sample of `plan`.
bool vanishes(const Expr& e, const SamplePlan& plan);

/// The codistribution Omega_m built step by step over a SampledSpan. Omega_0
/// holds the gradients of every output and of the observable seeds; each step
/// adds Lie derivatives of the previous step's new generators along the known
/// fields and along g / L1, plus L_{phi^i_{m-1}} h for every output. Candidates
/// already in the span at every sample are dropped.
class OmegaRecursion {
 public:
  OmegaRecursion(const SystemSpec& sys, std::size_t primary_output, SampledSpan& span);

  /// Builds Omega_{m+1}; returns the number of generators it added.
  std::size_t step();
  int m() const noexcept { return m_; }
  int rank() const { return span_.rank(); }
  const std::vector<int>& ranks() const noexcept { return ranks_; }
  const std::vector<Expr>& functions() const noexcept { return functions_; }
  const RhoData& rho() const noexcept { return rho_; }
  SampledSpan& span() noexcept { return span_; }
  Codistribution codistribution() const;

 private:
  const SystemSpec& sys_;
  SampledSpan& span_;
  RhoData rho_;
  Expr inv_L1_;
  std::vector<VectorField> phi_;  // phi^i_{m} for the current m
  std::vector<Expr> frontier_;
  std::vector<Expr> functions_;
  std::vector<int> ranks_;
  int m_ = 0;

  bool offer(const Expr& candidate, std::vector<Expr>& added);
};

/// Plan whose guards reject points where L1 of `output` is small.
SamplePlan guarded_plan(const SystemSpec& sys, const SamplePlan& plan, std::size_t output = 0);

/// Omega_m with numerical pruning, seeded by all outputs.
Codistribution omega(const SystemSpec& sys, int m, const SamplePlan& plan, std::size_t output = 0);

struct RelativeDegree {
  std::optional<int> r;  // over the chosen known input
  std::size_t input = 0;
  std::vector<std::optional<int>> per_input;
};

/// Smallest r <= n with L_g L_{f_i}^{r-1} h generically nonzero, maximized
/// over the known inputs f_i.
RelativeDegree relative_degree(const SystemSpec& sys, const SamplePlan& plan, std::size_t output = 0);

/// Checks the user map near x0: Q_inverse(Q(x)) = x at samples, dQ nonsingular
/// at x0, and dQ_1..dQ_r spanning the same space as d L_f^i h, i < r.
/// Throws SpecError with the failing check.
void validate_coordinate_change(const SystemSpec& sys, const CoordinateMap& change, int r, std::size_t input,
                                const SamplePlan& plan, std::size_t output = 0);

struct CoordinateChangeInfo {
  int r = 1;
  std::size_t input = 0;
  /// Whether each of the first r new coordinates equals L_f^i h; when it does
  /// the transformed system uses the coordinate itself.
  std::vector<bool> coordinate_matches;
};

/// Rewrites the system in x' = Q(x): fields become (dQ/dx f) o Q_inverse,
/// the output becomes L_f^{r-1} h in the new coordinates (x'_r when they
/// agree), L_f^i h for i < r - 1 become observable seeds, and x0 maps to Q(x0).
/// Other outputs are carried over by composition.
SystemSpec apply_coordinate_change(const SystemSpec& sys, const CoordinateMap& change, int r,
                                   std::size_t input, const SamplePlan& plan, std::size_t output = 0,
                                   CoordinateChangeInfo* info = nullptr);

enum class Certificate { None, StopCriterion, EarlyExit, RelativeDegree };
std::string to_string(Certificate c);

struct AnalysisOptions {
  SamplePlan plan;           // box in the original coordinates
  int max_m = -1;            // largest m tested; -1 means 2n + 2
  bool early_exit = false;
};

enum class Status { Done, Undecided, NotHandled };
std::string to_string(Status s);

struct AnalysisResult {
  Status status = Status::Undecided;
  Certificate certificate = Certificate::None;
  std::vector<Verdict> verdicts;  // per original state component

  std::size_t primary_output = 0;
  std::string L1g;
  std::string rho;
  bool rho_zero = false;

  bool coordinate_change_used = false;
  int relative_degree = 1;
  std::size_t relative_degree_input = 0;
  std::vector<std::optional<int>> relative_degree_per_input;

  std::optional<int> m_prime;  // reported with the coordinate-change offset r - 1
  std::optional<int> m_star;
  int rank = 0;
  std::vector<int> ranks;  // generic rank of Omega_m, m = 0, 1, ...
  int bound = 0;           // 2n + 2
  int order_offset = 0;    // r - 1 after a coordinate change, else 0

  /// The system the recursion ran on, when a coordinate change produced it.
  std::optional<SystemSpec> transformed;

  std::vector<std::string> diagnostics;
  SampleStats stats;
};

/// The five-step procedure for systems with one unknown input and no drift.
AnalysisResult analyze(const SystemSpec& sys, const AnalysisOptions& options);

/// Compares Omega-bar_m of the order-m extended system with
/// [Omega_m, 0] + span{d L_G^j h, j = 1..m}, output by output (outputs whose
/// L1 vanishes are skipped). Observable seeds are ignored.
struct SeparationCheck {
  std::size_t output = 0;
  int m = 0;
  bool equal = false;
  int rank_bar = 0;
  int rank_tilde = 0;
};
std::vector<SeparationCheck> separation_checks(const SystemSpec& sys, int m, const SamplePlan& plan);
bool verify_separation(const SystemSpec& sys, int m, const SamplePlan& plan);

/// Builds Omega_m, then `extra` more steps; entry p - 1 tells whether
/// Omega_{m+p} equals Omega_m.
std::vector<bool> verify_stop(const SystemSpec& sys, int m, int extra, const SamplePlan& plan,
                              std::size_t output = 0);

/// Largest relative residuals of the psi/phi expansion (for j <= j_max) and
/// of the key equality for L_{phi_j} h (for 2 <= j <= j_max), per known input.
struct IdentityResiduals {
  std::size_t input = 0;
  std::vector<double> psi_phi;  // index j
  std::vector<double> key;      // index j; entries for j < 2 are 0
  int samples = 0;
};
std::vector<IdentityResiduals> verify_identities(const SystemSpec& sys, int j_max, const SamplePlan& plan,
                                                 std::size_t output = 0);

}  // namespace uiobs
