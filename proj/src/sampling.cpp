#include <cmath>

#include "uiobs/diffgeo.hpp"

namespace uiobs {
namespace {

// Guards pass and every probe evaluates at `point`.
bool acceptable(const SamplePlan& plan, std::span<const Expr> probes, std::span<const double> point,
                SampleStats* stats) {
  Evaluator ev(point);
  try {
    for (const auto& g : plan.guards) {
      if (std::abs(ev(g)) < plan.guard_min) {
        if (stats) ++stats->rejected_guard;
        return false;
      }
    }
    for (const auto& p : probes) ev(p);
  } catch (const DomainError&) {
    if (stats) ++stats->rejected_domain;
    return false;
  }
  return true;
}

long attempt_budget(const SamplePlan& plan) { return 10L * plan.samples; }

}  // namespace

SamplePlan SamplePlan::around(std::vector<double> center, double half_width) {
  SamplePlan plan;
  plan.half_width.assign(center.size(), half_width);
  plan.center = std::move(center);
  return plan;
}

void SamplePlan::validate(std::size_t dim) const {
  if (samples < 1) throw SpecError("sample count must be at least 1");
  if (!(tol > 0)) throw SpecError("rank tolerance must be positive");
  if (center.size() != dim || half_width.size() != dim) {
    throw SpecError("sampling box has dimension " + std::to_string(center.size()) + " but the space has " +
                    std::to_string(dim));
  }
  for (double h : half_width) {
    if (!(h > 0) || !std::isfinite(h)) throw SpecError("sampling box half-widths must be positive");
  }
  for (double c : center) {
    if (!std::isfinite(c)) throw SpecError("sampling box center must be finite");
  }
}

PointStream::PointStream(const SamplePlan& plan)
    : center_(plan.center), half_width_(plan.half_width), rng_(plan.seed) {}

std::vector<double> PointStream::next() {
  std::vector<double> p(center_.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    // 53 random bits mapped to [0, 1); independent of the library's distributions.
    double u = static_cast<double>(rng_() >> 11U) * 0x1.0p-53;
    p[i] = center_[i] + (2.0 * u - 1.0) * half_width_[i];
  }
  return p;
}

std::vector<std::vector<double>> draw_points(const SamplePlan& plan, std::span<const Expr> probes,
                                             SampleStats* stats) {
  plan.validate(plan.center.size());
  PointStream stream(plan);
  std::vector<std::vector<double>> points;
  for (long attempt = 0; attempt < attempt_budget(plan) && static_cast<int>(points.size()) < plan.samples;
       ++attempt) {
    auto p = stream.next();
    if (stats) ++stats->attempts;
    if (acceptable(plan, probes, p, stats)) points.push_back(std::move(p));
  }
  if (points.empty()) {
    throw SamplingError("no valid sample point in " + std::to_string(attempt_budget(plan)) +
                        " attempts; the sampling box may lie inside a singular locus");
  }
  return points;
}

int numeric_rank(const Eigen::MatrixXd& rows, double tol) {
  if (rows.rows() == 0 || rows.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol * s(0)) ++r;
  }
  return r;
}

Eigen::RowVectorXd evaluate_row(Evaluator& ev, const Covector& omega) {
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(omega.size()));
  for (std::size_t j = 0; j < omega.size(); ++j) {
    Evaluated v = ev.eval(omega[j]);
    row(static_cast<Eigen::Index>(j)) = v.negligible() ? 0.0 : v.value;
  }
  double norm = row.norm();
  if (norm > 0) row /= norm;
  return row;
}

// --- SampledSpan -------------------------------------------------------------

SampledSpan::SampledSpan(std::size_t dim, const SamplePlan& plan, std::span<const Expr> probes,
                         SampleStats* stats)
    : dim_(dim), plan_(plan), stats_(stats), probes_(probes.begin(), probes.end()) {
  plan_.validate(dim);
  stream_ = std::make_unique<PointStream>(plan_);
  budget_ = attempt_budget(plan_);
  while (budget_ > 0 && static_cast<int>(samples_.size()) < plan_.samples) {
    --budget_;
    auto p = stream_->next();
    if (stats_) ++stats_->attempts;
    if (!acceptable(plan_, probes_, p, stats_)) continue;
    Sample s;
    s.point = std::move(p);
    s.ev = std::make_unique<Evaluator>(s.point);
    s.rows.resize(0, static_cast<Eigen::Index>(dim_));
    samples_.push_back(std::move(s));
  }
  if (samples_.empty()) {
    throw SamplingError("no valid sample point in " + std::to_string(attempt_budget(plan_)) +
                        " attempts; the sampling box may lie inside a singular locus");
  }
}

void SampledSpan::replace_sample(std::size_t i) {
  while (budget_ > 0) {
    --budget_;
    auto p = stream_->next();
    if (stats_) ++stats_->attempts;
    if (!acceptable(plan_, probes_, p, stats_)) continue;
    Sample s;
    s.point = std::move(p);
    s.ev = std::make_unique<Evaluator>(s.point);
    s.rows.resize(static_cast<Eigen::Index>(generators_.size()), static_cast<Eigen::Index>(dim_));
    try {
      for (std::size_t k = 0; k < generators_.size(); ++k) {
        s.rows.row(static_cast<Eigen::Index>(k)) = evaluate_row(*s.ev, generators_[k]);
      }
    } catch (const DomainError&) {
      if (stats_) ++stats_->rejected_domain;
      continue;
    }
    s.rank = numeric_rank(s.rows, plan_.tol);
    samples_[i] = std::move(s);
    return;
  }
  samples_.erase(samples_.begin() + static_cast<std::ptrdiff_t>(i));
  if (samples_.empty()) {
    throw SamplingError("every sample point hit a domain error; the sampling box may lie inside a singular locus");
  }
}

std::vector<Eigen::RowVectorXd> SampledSpan::rows_for(const Covector& omega) {
  if (omega.size() != dim_) {
    throw DimensionError("covector of length " + std::to_string(omega.size()) + " in a space of dimension " +
                         std::to_string(dim_));
  }
  std::vector<Eigen::RowVectorXd> rows;
  for (std::size_t i = 0; i < samples_.size();) {
    try {
      rows.push_back(evaluate_row(*samples_[i].ev, omega));
      ++i;
    } catch (const DomainError&) {
      if (stats_) ++stats_->rejected_domain;
      std::size_t before = samples_.size();
      replace_sample(i);
      if (samples_.size() < before) continue;  // dropped; retry the same index
    }
  }
  return rows;
}

bool SampledSpan::add(const Covector& omega) {
  auto rows = rows_for(omega);
  std::vector<Eigen::MatrixXd> stacked(samples_.size());
  std::vector<int> ranks(samples_.size());
  bool raises = false;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    stacked[i].resize(s.rows.rows() + 1, static_cast<Eigen::Index>(dim_));
    stacked[i] << s.rows, rows[i];
    ranks[i] = numeric_rank(stacked[i], plan_.tol);
    raises = raises || ranks[i] > s.rank;
  }
  if (!raises) return false;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    samples_[i].rows = std::move(stacked[i]);
    samples_[i].rank = ranks[i];
  }
  generators_.push_back(omega);
  return true;
}

bool SampledSpan::contains(const Covector& omega) {
  auto rows = rows_for(omega);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    Eigen::MatrixXd m(s.rows.rows() + 1, static_cast<Eigen::Index>(dim_));
    m << s.rows, rows[i];
    if (numeric_rank(m, plan_.tol) > s.rank) return false;
  }
  return true;
}

int SampledSpan::rank() const {
  int r = 0;
  for (const auto& s : samples_) r = std::max(r, s.rank);
  return r;
}

std::vector<int> SampledSpan::ranks() const {
  std::vector<int> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.rank);
  return out;
}

// --- one-shot queries ---------------------------------------------------------

namespace {

void collect(const Codistribution& cod, std::vector<Expr>& out) {
  for (const auto& g : cod.generators) {
    if (g.size() != cod.dim()) {
      throw DimensionError("generator of length " + std::to_string(g.size()) + " in a space of dimension " +
                           std::to_string(cod.dim()));
    }
    out.insert(out.end(), g.begin(), g.end());
  }
}

SampledSpan build(const Codistribution& cod, const SamplePlan& plan, std::span<const Expr> probes,
                  SampleStats* stats) {
  SampledSpan span(cod.dim(), plan, probes, stats);
  for (const auto& g : cod.generators) span.add(g);
  return span;
}

}  // namespace

int generic_rank(const Codistribution& cod, const SamplePlan& plan, SampleStats* stats) {
  std::vector<Expr> probes;
  collect(cod, probes);
  return build(cod, plan, probes, stats).rank();
}

bool contains(const Codistribution& cod, const Covector& omega, const SamplePlan& plan, SampleStats* stats) {
  std::vector<Expr> probes;
  collect(cod, probes);
  probes.insert(probes.end(), omega.begin(), omega.end());
  return build(cod, plan, probes, stats).contains(omega);
}

bool same_span(const Codistribution& a, const Codistribution& b, const SamplePlan& plan, SampleStats* stats) {
  if (!(a.space == b.space)) throw DimensionError("same_span: codistributions live in different spaces");
  std::vector<Expr> probes;
  collect(a, probes);
  collect(b, probes);
  SampledSpan sa = build(a, plan, probes, stats);
  SampledSpan sb = build(b, plan, probes, stats);
  if (sa.ranks() != sb.ranks()) return false;
  for (const auto& g : b.generators) {
    if (!sa.contains(g)) return false;
  }
  return true;
}

}  // namespace uiobs
