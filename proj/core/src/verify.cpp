#include "lincg/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "lincg/errors.hpp"

namespace lincg {

std::string_view to_string(IdentityId id) {
  switch (id) {
    case IdentityId::DescentIdentity: return "descent_identity";
    case IdentityId::DirectionConjugacy: return "direction_conjugacy";
    case IdentityId::GradientDirectionOrthogonality: return "gradient_direction_orthogonality";
    case IdentityId::GradientOrthogonality: return "gradient_orthogonality";
    case IdentityId::GradientConjugacyAdjacent: return "gradient_conjugacy_adjacent";
    case IdentityId::GradientConjugacyFar: return "gradient_conjugacy_far";
    case IdentityId::StepsizeEquivalence: return "stepsize_equivalence";
    case IdentityId::BetaAgreement: return "beta_agreement";
    case IdentityId::TerminationWithinN: return "termination_within_n";
    case IdentityId::SolutionAccuracy: return "solution_accuracy";
  }
  return "?";
}

IdentityId identity_from_string(std::string_view name) {
  for (int v = 0; v <= static_cast<int>(IdentityId::SolutionAccuracy); ++v) {
    const auto id = static_cast<IdentityId>(v);
    if (to_string(id) == name) return id;
  }
  throw InvalidArgument("unknown identity '" + std::string(name) + "'");
}

std::string_view to_string(ToleranceRegime regime) {
  switch (regime) {
    case ToleranceRegime::Standard: return "standard";
    case ToleranceRegime::Relaxed: return "relaxed";
    case ToleranceRegime::Custom: return "custom";
  }
  return "?";
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerificationReport::find(IdentityId id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

double VerificationReport::worst(IdentityId id) const {
  const auto* c = find(id);
  return c ? c->worst_violation : 0.0;
}

void VerificationReport::append(VerificationReport other) {
  for (auto& c : other.checks) checks.push_back(std::move(c));
  terminal_gradient_excluded = terminal_gradient_excluded || other.terminal_gradient_excluded;
}

// ---------------------------------------------------------------------------

namespace {

/// Builds one CheckResult; normalization by a zero scale maps a zero residual to 0.
class CheckBuilder {
 public:
  CheckBuilder(IdentityId id, double tolerance) {
    result_.id = id;
    result_.tolerance = tolerance;
  }

  void add(std::size_t i, std::optional<std::size_t> j, double raw, double scale) {
    double normalized = 0.0;
    std::string note;
    if (scale > 0.0 && std::isfinite(scale)) {
      normalized = raw / scale;
    } else if (raw != 0.0) {
      normalized = raw;
      note = "zero normalization scale; raw value reported";
    }
    if (!std::isfinite(normalized)) {
      normalized = std::numeric_limits<double>::max();
      note = "non-finite residual";
    }
    push(i, j, raw, normalized, std::move(note));
  }

  /// An entry that holds exactly, e.g. a count within its bound.
  void add_exact(std::size_t i, std::optional<std::size_t> j, double raw) {
    push(i, j, raw, 0.0, {});
  }

  void add_failure(std::size_t i, std::optional<std::size_t> j, double raw, std::string note) {
    push(i, j, std::isfinite(raw) ? raw : 0.0, 1.0, std::move(note));
  }

  CheckResult finish() { return std::move(result_); }

 private:
  void push(std::size_t i, std::optional<std::size_t> j, double raw, double normalized,
            std::string note) {
    IdentityResidual r;
    r.id = result_.id;
    r.i = i;
    r.j = j;
    r.raw = raw;
    r.normalized = normalized;
    r.pass = std::abs(normalized) <= result_.tolerance;
    r.note = std::move(note);
    result_.worst_violation = std::max(result_.worst_violation, std::abs(normalized));
    result_.passed = result_.passed && r.pass;
    result_.residuals.push_back(std::move(r));
  }

  CheckResult result_;
};

void require_recorded(const IterationTrace& trace, std::size_t n) {
  if (trace.records.size() != trace.terminated_at)
    throw IncompleteTraceError("trace holds " + std::to_string(trace.records.size()) +
                               " records for " + std::to_string(trace.terminated_at) +
                               " iterations; solve with record_trace enabled");
  for (const auto& r : trace.records)
    if (r.x.size() != n || r.g.size() != n || r.d.size() != n || r.ad.size() != n)
      throw IncompleteTraceError("record " + std::to_string(r.k) +
                                 " lacks x, g, d or cached Ad of length " + std::to_string(n));
  if (trace.final_g.size() != n)
    throw IncompleteTraceError("trace lacks its final gradient");
}

/// Gradients that count as nonzero: every recorded one, plus the final one unless
/// the solve declared it converged.
std::vector<std::span<const double>> active_gradients(const IterationTrace& trace) {
  std::vector<std::span<const double>> out;
  for (const auto& r : trace.records) out.emplace_back(r.g);
  if (!trace.converged()) out.emplace_back(trace.final_g);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

double estimate_condition(const SpdMatrix& a) {
  const std::size_t n = a.order();
  if (n == 1) return 1.0;
  constexpr int kMaxIterations = 300;
  constexpr double kRelativeChange = 1e-10;

  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  Vector start(n);
  for (double& e : start) e = normal(rng);

  auto iterate = [&](auto&& apply) {
    Vector v = start;
    const double len = norm(v);
    for (double& e : v) e /= len;
    Vector w(n);
    double rayleigh = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
      apply(v, w);
      const double next = dot(v, w);
      const double wn = norm(w);
      if (!(wn > 0.0)) break;
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
      const bool settled = it > 0 && std::abs(next - rayleigh) <= kRelativeChange * std::abs(next);
      rayleigh = next;
      if (settled) break;
    }
    return rayleigh;
  };

  const double lambda_max = iterate([&](const Vector& v, Vector& w) { a.multiply(v, w); });
  try {
    const auto chol = CholeskyFactor::factor(a.matrix());
    const double inv_min =
        iterate([&](const Vector& v, Vector& w) { w = chol.solve(v); });
    if (!(inv_min > 0.0)) return std::numeric_limits<double>::infinity();
    return lambda_max * inv_min;
  } catch (const NotPositiveDefiniteError&) {
    return std::numeric_limits<double>::infinity();
  }
}

ToleranceChoice choose_tolerance(const SpdMatrix& a, const VerifyOptions& options) {
  const double kappa = estimate_condition(a);
  if (options.tolerance) return {ToleranceRegime::Custom, *options.tolerance, kappa};
  if (kappa > options.relax_above_condition)
    return {ToleranceRegime::Relaxed, options.relaxed_tolerance, kappa};
  return {ToleranceRegime::Standard, options.standard_tolerance, kappa};
}

// ---------------------------------------------------------------------------

VerificationReport check_classical_identities(const IterationTrace& trace, const SpdMatrix& a,
                                              double tolerance) {
  const std::size_t n = a.order();
  require_recorded(trace, n);
  const auto& recs = trace.records;
  const auto grads = active_gradients(trace);

  CheckBuilder descent(IdentityId::DescentIdentity, tolerance);
  CheckBuilder conj(IdentityId::DirectionConjugacy, tolerance);
  CheckBuilder gd(IdentityId::GradientDirectionOrthogonality, tolerance);
  CheckBuilder gg(IdentityId::GradientOrthogonality, tolerance);

  std::vector<double> curvature(recs.size());
  std::vector<double> d_norm(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    curvature[i] = dot(recs[i].d, recs[i].ad);
    d_norm[i] = norm(recs[i].d);
  }
  std::vector<double> g_norm(grads.size());
  for (std::size_t i = 0; i < grads.size(); ++i) g_norm[i] = norm(grads[i]);

  for (std::size_t i = 0; i < recs.size(); ++i) {
    const double gg_ii = g_norm[i] * g_norm[i];
    descent.add(i, std::nullopt, dot(recs[i].g, recs[i].d) + gg_ii, gg_ii);
    for (std::size_t j = 0; j < i; ++j)
      conj.add(i, j, dot(recs[i].d, recs[j].ad), std::sqrt(curvature[i] * curvature[j]));
  }
  for (std::size_t i = 0; i < grads.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      gd.add(i, j, dot(grads[i], recs[j].d), g_norm[i] * d_norm[j]);
      gg.add(i, j, dot(grads[i], grads[j]), g_norm[i] * g_norm[j]);
    }

  VerificationReport report;
  report.tolerance = tolerance;
  report.terminal_gradient_excluded = trace.converged() && trace.terminated_at > 0;
  report.checks = {descent.finish(), conj.finish(), gd.finish(), gg.finish()};
  return report;
}

VerificationReport check_gradient_conjugacy(const IterationTrace& trace, const SpdMatrix& a,
                                            double tolerance) {
  const std::size_t n = a.order();
  require_recorded(trace, n);
  if (trace.records.empty()) throw IncompleteTraceError("gradient conjugacy needs at least one step");
  const auto grads = active_gradients(trace);

  std::vector<Vector> ag;
  ag.reserve(grads.size());
  std::vector<double> a_norm(grads.size());
  for (std::size_t i = 0; i < grads.size(); ++i) {
    ag.push_back(matvec(a, grads[i]));
    a_norm[i] = std::sqrt(std::max(0.0, dot(grads[i], ag[i])));
  }

  CheckBuilder adjacent(IdentityId::GradientConjugacyAdjacent, tolerance);
  CheckBuilder far(IdentityId::GradientConjugacyFar, tolerance);
  for (std::size_t k = 0; k + 1 < grads.size(); ++k) {
    const auto next = grads[k + 1];
    const double alpha = trace.records[k].alpha;
    adjacent.add(k + 1, k, dot(next, ag[k]) + dot(next, next) / alpha,
                 a_norm[k + 1] * a_norm[k]);
    for (std::size_t i = 0; i + 1 < k; ++i)
      far.add(k + 1, i, dot(next, ag[i]), a_norm[k + 1] * a_norm[i]);
  }

  VerificationReport report;
  report.tolerance = tolerance;
  report.terminal_gradient_excluded = trace.converged() && trace.terminated_at > 0;
  report.checks = {adjacent.finish(), far.finish()};
  return report;
}

VerificationReport check_stepsize_equivalence(const IterationTrace& trace, double tolerance) {
  require_recorded(trace, trace.final_g.size());
  CheckBuilder check(IdentityId::StepsizeEquivalence, tolerance);
  // Zero threshold: only exact zeros count as breakdown when re-deriving recorded steps.
  for (const auto& r : trace.records) {
    try {
      const double exact = stepsize_exact(r.g, r.d, r.ad, r.k, 0.0);
      const double orth = stepsize_orthogonal(r.g, r.ad, r.k, 0.0);
      check.add(r.k, std::nullopt, exact - orth, std::abs(exact));
    } catch (const BreakdownError& e) {
      check.add_failure(r.k, std::nullopt, e.denominator(), e.what());
    }
  }
  VerificationReport report;
  report.tolerance = tolerance;
  report.checks = {check.finish()};
  return report;
}

VerificationReport check_finite_termination(const IterationTrace& trace,
                                            const QuadraticProblem& problem, double tolerance,
                                            std::optional<double> solution_tolerance) {
  const std::size_t n = problem.dimension();
  if (trace.final_x.size() != n) throw IncompleteTraceError("trace lacks its final iterate");

  CheckBuilder within(IdentityId::TerminationWithinN, tolerance);
  const auto k = trace.terminated_at;
  if (trace.converged() && k <= n) {
    within.add_exact(k, std::nullopt, static_cast<double>(k));
  } else {
    within.add_failure(k, std::nullopt, static_cast<double>(k),
                       std::string("terminated at ") + std::to_string(k) + " of n = " +
                           std::to_string(n) + " with " + std::string(to_string(trace.reason)));
  }

  CheckBuilder accuracy(IdentityId::SolutionAccuracy, solution_tolerance.value_or(tolerance));
  try {
    const auto chol = CholeskyFactor::factor(problem.matrix().matrix());
    Vector neg_b = problem.rhs();
    for (double& v : neg_b) v = -v;
    const Vector x_oracle = chol.solve(neg_b);
    const Vector diff = add_scaled(trace.final_x, -1.0, x_oracle);
    const double scale = norm(x_oracle);
    accuracy.add(k, std::nullopt, norm(diff), scale > 0.0 ? scale : 1.0);
  } catch (const NotPositiveDefiniteError& e) {
    accuracy.add_failure(k, std::nullopt, e.pivot(),
                         std::string("oracle factorization failed: ") + e.what());
  }

  VerificationReport report;
  report.tolerance = tolerance;
  report.checks = {within.finish(), accuracy.finish()};
  return report;
}

VerificationReport check_beta_agreement(const IterationTrace& trace, double tolerance) {
  require_recorded(trace, trace.final_g.size());
  constexpr std::array kRules = {BetaRule::FletcherReeves, BetaRule::HestenesStiefel,
                                 BetaRule::PolakRibierePolyak, BetaRule::DaiYuan};

  CheckBuilder check(IdentityId::BetaAgreement, tolerance);
  // Only β_k that built a direction. β at the final iterate never enters the iteration,
  // and after n capped steps its gradient is the rounding remnant of an exact zero.
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    const auto& prev = trace.records[k - 1];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double magnitude = 0.0;
    std::string failed;
    for (const auto rule : kRules) {
      try {
        const double b = beta(rule, trace.records[k].g, prev.g, prev.d, k, 0.0);
        lo = std::min(lo, b);
        hi = std::max(hi, b);
        magnitude = std::max(magnitude, std::abs(b));
      } catch (const BreakdownError& e) {
        failed += (failed.empty() ? "" : "; ") + std::string(e.what());
      }
    }
    if (!failed.empty())
      check.add_failure(k, std::nullopt, 0.0, failed);
    else
      check.add(k, std::nullopt, hi - lo, magnitude);
  }

  VerificationReport report;
  report.tolerance = tolerance;
  report.terminal_gradient_excluded = trace.converged() && trace.terminated_at > 0;
  report.checks = {check.finish()};
  return report;
}

VerificationReport verify_trace(const IterationTrace& trace, const QuadraticProblem& problem,
                                const VerifyOptions& options) {
  const auto choice = choose_tolerance(problem.matrix(), options);
  const double tol = choice.tolerance;

  VerificationReport report = check_classical_identities(trace, problem.matrix(), tol);
  report.append(check_gradient_conjugacy(trace, problem.matrix(), tol));
  report.append(check_stepsize_equivalence(trace, tol));
  report.append(check_finite_termination(trace, problem, tol, options.solution_tolerance));
  report.append(check_beta_agreement(trace, tol));
  report.regime = choice.regime;
  report.tolerance = tol;
  report.condition_estimate = choice.condition_estimate;
  return report;
}

}  // namespace lincg
