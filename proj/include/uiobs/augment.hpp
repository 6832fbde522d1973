#pragma once

#include <string>
#include <vector>

#include "uiobs/system.hpp"

namespace uiobs {

/// The system with the unknown inputs and their first k-1 time derivatives
/// appended to the state: [x, w, w^(1), ..., w^(k-1)].
struct ExtendedSystem {
  int k = 0;
  std::size_t n = 0;
  std::size_t m_w = 0;
  VarSpace space;
  VectorField f0;              // drift of the extended system
  std::vector<VectorField> f;  // known-input fields, zero in the appended slots
  std::vector<Expr> outputs;

  /// Index of w_j^(order) in the extended state.
  std::size_t slot(int order, std::size_t j) const { return n + static_cast<std::size_t>(order) * m_w + j; }
  /// Unit vector along the highest appended derivative of w_j (the
  /// direction the k-th derivative of w_j enters).
  VectorField unit_direction(std::size_t j) const;
};

/// Name of w_j^(order): the input name for order 0, name_d<order> otherwise.
std::string jet_name(const SystemSpec& sys, int order, std::size_t j);

ExtendedSystem extend_system(const SystemSpec& sys, int k);

/// Sampling box for the extended space: states around the base plan's box,
/// unknown-input jets around `jet_center` +- `jet_half_width`.
struct JetBox {
  double center = 1.0;
  double half_width = 0.3;
};
SamplePlan extended_plan(const SamplePlan& state_plan, const ExtendedSystem& ext, const JetBox& jets = {});

/// Scalar generators of the extended recursion up to step m: the outputs and every Lie
/// derivative of them along the extended drift and known-input fields, with
/// no pruning. The codistribution is spanned by their gradients.
std::vector<Expr> omega_bar_functions(const ExtendedSystem& ext, int m);
/// Unpruned codistribution of the extended recursion at step m <= k.
Codistribution omega_bar(const ExtendedSystem& ext, int m);

/// The extended recursion with numerical pruning: candidates are kept only when they
/// raise the rank at some sample.
struct OmegaBarBuild {
  std::vector<Expr> functions;  // kept generators
  std::vector<int> ranks;       // generic rank after each step 0..m
  bool stabilized = false;      // the last step added nothing
};
OmegaBarBuild omega_bar(const ExtendedSystem& ext, int m, SampledSpan& span);

enum class Verdict { Observable, NotObservable, Undecided };
std::string to_string(Verdict v);

/// EORC outcome at one order k.
struct EorcOrder {
  int k = 0;
  int steps = 0;  // recursion steps taken (k, or until stable when m_w = 0)
  std::vector<int> ranks;
  int rank = 0;
  std::vector<bool> observable;  // per original state component
};

/// Runs the extended recursion in the order-k extended system and tests dx_j for every
/// original state component. With no unknown inputs the recursion runs until
/// it stabilizes (the standard observability rank condition).
EorcOrder eorc_report(const SystemSpec& sys, int k, const SamplePlan& state_plan, const JetBox& jets = {},
                      SampleStats* stats = nullptr);

}  // namespace uiobs
