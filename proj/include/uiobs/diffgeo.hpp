#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uiobs/expr.hpp"

namespace uiobs {

/// Column vector of expressions (a vector field).
using VectorField = std::vector<Expr>;
/// Row vector of expressions (a one-form).
using Covector = std::vector<Expr>;

/// Span of a list of covectors over a fixed ambient space. The list may be
/// redundant; only its span matters.
struct Codistribution {
  VarSpace space;
  std::vector<Covector> generators;

  std::size_t dim() const noexcept { return space.size(); }
};

Covector gradient(const Expr& h, const VarSpace& space);
/// Gradient in an ambient space of dimension n; variables are positional.
Covector gradient(const Expr& h, std::size_t n);

/// L_f h = sum_i (dh/dx_i) f_i.
Expr lie_scalar(const VectorField& f, const Expr& h);
/// [f, g] = (dg/dx) f - (df/dx) g.
VectorField lie_bracket(const VectorField& f, const VectorField& g);
/// Lie derivative of a one-form along f.
Covector lie_covector(const VectorField& f, const Covector& omega);

VectorField scaled(const VectorField& f, const Expr& c);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);

/// Random sampling box and rank tolerance for every numerical decision.
struct SamplePlan {
  std::uint64_t seed = 42;
  int samples = 7;
  double tol = 1e-8;  // singular values below tol * sigma_max count as zero
  std::vector<double> center;
  std::vector<double> half_width;
  /// Points where any guard is below guard_min in magnitude are rejected.
  std::vector<Expr> guards;
  double guard_min = 1e-6;

  static SamplePlan around(std::vector<double> center, double half_width);
  /// Throws SpecError unless the plan is usable in dimension `dim`.
  void validate(std::size_t dim) const;
};

/// Counters accumulated across sampling queries.
struct SampleStats {
  long attempts = 0;
  long rejected_domain = 0;
  long rejected_guard = 0;

  long rejected() const noexcept { return rejected_domain + rejected_guard; }
};

/// Deterministic stream of candidate points inside the plan's box.
class PointStream {
 public:
  explicit PointStream(const SamplePlan& plan);
  std::vector<double> next();

 private:
  std::vector<double> center_;
  std::vector<double> half_width_;
  std::mt19937_64 rng_;
};

/// Draws up to plan.samples points that pass the guards and where every
/// expression in `probes` evaluates, using at most 10 * samples candidates.
/// Throws SamplingError when no point survives.
std::vector<std::vector<double>> draw_points(const SamplePlan& plan, std::span<const Expr> probes,
                                             SampleStats* stats = nullptr);

/// Numerical rank: singular values at or below tol * sigma_max count as zero.
int numeric_rank(const Eigen::MatrixXd& rows, double tol);

/// Evaluates a covector at one point, zeroing entries lost in rounding noise
/// and normalizing to unit length. Returns a zero row for a vanishing covector.
Eigen::RowVectorXd evaluate_row(Evaluator& ev, const Covector& omega);

/// A span of covectors evaluated at a fixed set of sample points. Generators
/// are only stored when they raise the rank at some sample, so the stored
/// list stays close to a basis.
class SampledSpan {
 public:
  SampledSpan(std::size_t dim, const SamplePlan& plan, std::span<const Expr> probes = {},
              SampleStats* stats = nullptr);

  /// Adds `omega` if it raises the rank at any sample; returns whether it did.
  bool add(const Covector& omega);
  /// True when `omega` lies in the span at every sample.
  bool contains(const Covector& omega);
  /// Generic rank: maximum over samples.
  int rank() const;
  std::vector<int> ranks() const;

  const std::vector<Covector>& generators() const noexcept { return generators_; }
  std::size_t sample_count() const noexcept { return samples_.size(); }
  const std::vector<double>& point(std::size_t i) const { return samples_[i].point; }
  Evaluator& evaluator(std::size_t i) { return *samples_[i].ev; }
  std::size_t dim() const noexcept { return dim_; }

 private:
  struct Sample {
    std::vector<double> point;
    std::unique_ptr<Evaluator> ev;
    Eigen::MatrixXd rows;
    int rank = 0;
  };

  // Evaluates omega at every sample, replacing samples where it is undefined.
  std::vector<Eigen::RowVectorXd> rows_for(const Covector& omega);
  void replace_sample(std::size_t i);

  std::size_t dim_;
  SamplePlan plan_;
  SampleStats* stats_;
  std::vector<Expr> probes_;
  std::vector<Sample> samples_;
  std::vector<Covector> generators_;
  std::unique_ptr<PointStream> stream_;
  long budget_ = 0;
};

int generic_rank(const Codistribution& cod, const SamplePlan& plan, SampleStats* stats = nullptr);
bool contains(const Codistribution& cod, const Covector& omega, const SamplePlan& plan,
              SampleStats* stats = nullptr);
bool same_span(const Codistribution& a, const Codistribution& b, const SamplePlan& plan,
               SampleStats* stats = nullptr);

}  // namespace uiobs
