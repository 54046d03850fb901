#include "lincg/cg.hpp"

#include <cmath>
#include <string>

#include "lincg/errors.hpp"
#include "lincg/format.hpp"

namespace lincg {

namespace {

[[noreturn]] void breakdown(const std::string& formula, std::size_t k, double denominator) {
  throw BreakdownError(formula + " breakdown at iteration " + std::to_string(k) +
                           ": denominator " + format_scalar(denominator),
                       formula, k, denominator);
}

bool is_zero(std::span<const double> v) {
  for (double e : v)
    if (e != 0.0) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// QuadraticProblem

QuadraticProblem::QuadraticProblem(SpdMatrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (b_.size() != a_.order())
    throw DimensionError("right-hand side has length " + std::to_string(b_.size()) +
                         ", matrix order is " + std::to_string(a_.order()));
  for (double v : b_)
    if (!std::isfinite(v)) throw InvalidArgument("right-hand side has a non-finite entry");
}

double QuadraticProblem::objective(std::span<const double> x) const {
  const Vector ax = matvec(a_, x);
  return 0.5 * dot(x, ax) + dot(b_, x);
}

Vector QuadraticProblem::gradient(std::span<const double> x) const {
  Vector g = matvec(a_, x);
  axpy(1.0, b_, g);
  return g;
}

QuadraticProblem QuadraticProblem::scaled(double c) const {
  Vector b = b_;
  for (double& v : b) v *= c;
  return QuadraticProblem(a_.scaled(c), std::move(b));
}

Vector gradient(const QuadraticProblem& problem, std::span<const double> x) {
  return problem.gradient(x);
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(StepsizeRule rule) {
  switch (rule) {
    case StepsizeRule::ExactLineSearch: return "exact";
    case StepsizeRule::GradientOrthogonality: return "orthogonal";
  }
  return "?";
}

std::string_view to_string(BetaRule rule) {
  switch (rule) {
    case BetaRule::FletcherReeves: return "fr";
    case BetaRule::HestenesStiefel: return "hs";
    case BetaRule::PolakRibierePolyak: return "prp";
    case BetaRule::DaiYuan: return "dy";
  }
  return "?";
}

std::string_view to_string(GradientUpdate mode) {
  switch (mode) {
    case GradientUpdate::Recurrence: return "recurrence";
    case GradientUpdate::Explicit: return "explicit";
  }
  return "?";
}

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::GradientBelowTolerance: return "GradientBelowTolerance";
    case TerminationReason::IterationCap: return "IterationCap";
    case TerminationReason::Breakdown: return "Breakdown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Config

void SolverConfig::validate() const {
  if (!(relative_tolerance >= 0.0)) throw InvalidArgument("relative tolerance must be >= 0");
  if (absolute_tolerance && !(*absolute_tolerance >= 0.0))
    throw InvalidArgument("absolute tolerance must be >= 0");
  if (max_iterations && *max_iterations == 0)
    throw InvalidArgument("iteration cap must be at least 1");
  if (!(breakdown_threshold >= 0.0)) throw InvalidArgument("breakdown threshold must be >= 0");
}

double SolverConfig::gradient_tolerance(double initial_gradient_norm) const {
  return absolute_tolerance ? *absolute_tolerance : relative_tolerance * initial_gradient_norm;
}

std::size_t SolverConfig::iteration_cap(std::size_t dimension) const {
  return max_iterations ? *max_iterations : dimension;
}

std::vector<std::span<const double>> IterationTrace::gradients() const {
  std::vector<std::span<const double>> out;
  out.reserve(records.size() + 1);
  for (const auto& r : records) out.emplace_back(r.g);
  out.emplace_back(final_g);
  return out;
}

// ---------------------------------------------------------------------------
// Formulas

double beta(BetaRule rule, std::span<const double> g, std::span<const double> g_prev,
            std::span<const double> d_prev, std::size_t k, double threshold) {
  if (g.size() != g_prev.size() || g.size() != d_prev.size())
    throw DimensionError("beta: vector lengths differ");
  const Vector y = add_scaled(g, -1.0, g_prev);
  switch (rule) {
    case BetaRule::FletcherReeves: {
      const double den = dot(g_prev, g_prev);
      if (den <= threshold) breakdown("FR", k, den);
      return dot(g, g) / den;
    }
    case BetaRule::HestenesStiefel: {
      const double den = dot(d_prev, y);
      if (std::abs(den) <= threshold) breakdown("HS", k, den);
      return dot(g, y) / den;
    }
    case BetaRule::PolakRibierePolyak: {
      const double den = dot(g_prev, g_prev);
      if (den <= threshold) breakdown("PRP", k, den);
      return dot(g, y) / den;
    }
    case BetaRule::DaiYuan: {
      const double den = dot(d_prev, y);
      if (std::abs(den) <= threshold) breakdown("DY", k, den);
      return dot(g, g) / den;
    }
  }
  throw InvalidArgument("unknown beta rule");
}

Vector direction(std::span<const double> g) {
  Vector d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
  return d;
}

Vector direction(std::span<const double> g, double beta_k, std::span<const double> d_prev) {
  if (g.size() != d_prev.size()) throw DimensionError("direction: vector lengths differ");
  Vector d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i] + beta_k * d_prev[i];
  return d;
}

double stepsize_exact(std::span<const double> g, std::span<const double> d,
                      std::span<const double> ad, std::size_t k, double threshold) {
  const double curvature = dot(d, ad);
  if (curvature <= threshold) breakdown("exact stepsize", k, curvature);
  return -dot(g, d) / curvature;
}

double stepsize_orthogonal(std::span<const double> g, std::span<const double> ad, std::size_t k,
                           double threshold) {
  const double den = dot(g, ad);
  if (std::abs(den) <= threshold) breakdown("orthogonal stepsize", k, den);
  return -dot(g, g) / den;
}

double stepsize(StepsizeRule rule, std::span<const double> g, std::span<const double> d,
                std::span<const double> ad, std::size_t k, double threshold) {
  return rule == StepsizeRule::ExactLineSearch ? stepsize_exact(g, d, ad, k, threshold)
                                               : stepsize_orthogonal(g, ad, k, threshold);
}

// ---------------------------------------------------------------------------
// Iteration

namespace {

void fill_step(const QuadraticProblem& problem, IterationRecord& r, const SolverConfig& config) {
  r.ad = matvec(problem.matrix(), r.d);
  r.alpha = stepsize(config.stepsize, r.g, r.d, r.ad, r.k, config.breakdown_threshold);
  if (!(r.alpha > 0.0) || !std::isfinite(r.alpha))
    breakdown(std::string(to_string(config.stepsize)) + " stepsize sign", r.k, r.alpha);
  if (config.evaluate_both_stepsizes) {
    const auto other = config.stepsize == StepsizeRule::ExactLineSearch
                           ? StepsizeRule::GradientOrthogonality
                           : StepsizeRule::ExactLineSearch;
    try {
      r.alpha_alternate = stepsize(other, r.g, r.d, r.ad, r.k, config.breakdown_threshold);
    } catch (const BreakdownError&) {
      r.alpha_alternate.reset();
    }
  }
}

}  // namespace

IterationRecord initial_record(const QuadraticProblem& problem, std::span<const double> x0,
                               const SolverConfig& config) {
  if (x0.size() != problem.dimension())
    throw DimensionError("x0 has length " + std::to_string(x0.size()) + ", problem dimension is " +
                         std::to_string(problem.dimension()));
  IterationRecord r;
  r.k = 0;
  r.x.assign(x0.begin(), x0.end());
  r.g = problem.gradient(r.x);
  r.d = direction(r.g);
  fill_step(problem, r, config);
  return r;
}

Iterate advance(const QuadraticProblem& problem, const IterationRecord& record,
                const SolverConfig& config) {
  Iterate next;
  next.x = add_scaled(record.x, record.alpha, record.d);
  if (config.gradient_update == GradientUpdate::Recurrence)
    next.g = add_scaled(record.g, record.alpha, record.ad);
  else
    next.g = problem.gradient(next.x);
  return next;
}

IterationRecord complete_record(const QuadraticProblem& problem, Iterate next,
                                const IterationRecord& prev, const SolverConfig& config) {
  IterationRecord r;
  r.k = prev.k + 1;
  r.x = std::move(next.x);
  r.g = std::move(next.g);
  r.beta = beta(config.beta, r.g, prev.g, prev.d, r.k, config.breakdown_threshold);
  r.d = direction(r.g, *r.beta, prev.d);
  fill_step(problem, r, config);
  return r;
}

IterationRecord step(const QuadraticProblem& problem, const IterationRecord& record,
                     const SolverConfig& config) {
  if (is_zero(record.g))
    throw InvalidArgument("step called at a zero gradient; the solve must terminate first");
  return complete_record(problem, advance(problem, record, config), record, config);
}

SolveResult solve(const QuadraticProblem& problem, std::span<const double> x0,
                  const SolverConfig& config) {
  config.validate();
  if (x0.size() != problem.dimension())
    throw DimensionError("x0 has length " + std::to_string(x0.size()) + ", problem dimension is " +
                         std::to_string(problem.dimension()));

  IterationTrace trace;
  trace.config = config;
  Vector x(x0.begin(), x0.end());
  Vector g = problem.gradient(x);
  trace.initial_gradient_norm = norm(g);
  trace.gradient_tolerance = config.gradient_tolerance(trace.initial_gradient_norm);
  const std::size_t cap = config.iteration_cap(problem.dimension());

  auto finish = [&](Vector fx, Vector fg, std::size_t k, TerminationReason why) {
    trace.final_x = std::move(fx);
    trace.final_g = std::move(fg);
    trace.terminated_at = k;
    trace.reason = why;
    SolveResult result{trace.final_x, std::move(trace)};
    return result;
  };

  if (norm(g) <= trace.gradient_tolerance)
    return finish(std::move(x), std::move(g), 0, TerminationReason::GradientBelowTolerance);

  IterationRecord current;
  try {
    current = initial_record(problem, x, config);
  } catch (const BreakdownError& e) {
    trace.breakdown_detail = e.what();
    return finish(std::move(x), std::move(g), 0, TerminationReason::Breakdown);
  }

  for (;;) {
    Iterate next = advance(problem, current, config);
    const std::size_t k = current.k + 1;
    const bool converged = norm(next.g) <= trace.gradient_tolerance;
    const bool capped = k >= cap;
    if (converged || capped) {
      if (config.record_trace) trace.records.push_back(std::move(current));
      return finish(std::move(next.x), std::move(next.g), k,
                    converged ? TerminationReason::GradientBelowTolerance
                              : TerminationReason::IterationCap);
    }
    IterationRecord following;
    try {
      following = complete_record(problem, next, current, config);
    } catch (const BreakdownError& e) {
      trace.breakdown_detail = e.what();
      if (config.record_trace) trace.records.push_back(std::move(current));
      return finish(std::move(next.x), std::move(next.g), k, TerminationReason::Breakdown);
    }
    if (config.record_trace) trace.records.push_back(std::move(current));
    current = std::move(following);
  }
}

SolveResult solve(const QuadraticProblem& problem, const SolverConfig& config) {
  const Vector x0(problem.dimension(), 0.0);
  return solve(problem, x0, config);
}

}  // namespace lincg
