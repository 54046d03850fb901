#ifndef LINCG_CG_HPP
#define LINCG_CG_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lincg/linalg.hpp"

namespace lincg {

/// f(x) = ½·xᵀAx + bᵀx with A symmetric positive definite. The minimizer solves Ax = −b.
class QuadraticProblem {
 public:
  /// Throws DimensionError if b does not match A, InvalidArgument if b has non-finite entries.
  QuadraticProblem(SpdMatrix a, Vector b);

  const SpdMatrix& matrix() const { return a_; }
  const Vector& rhs() const { return b_; }
  std::size_t dimension() const { return b_.size(); }

  double objective(std::span<const double> x) const;
  /// Ax + b
  Vector gradient(std::span<const double> x) const;

  /// (cA, cb). Leaves the minimizer and, in exact arithmetic, every CG iterate unchanged.
  QuadraticProblem scaled(double c) const;

 private:
  SpdMatrix a_;
  Vector b_;
};

Vector gradient(const QuadraticProblem& problem, std::span<const double> x);

enum class StepsizeRule {
  ExactLineSearch,        ///< α = −gᵀd / dᵀAd
  GradientOrthogonality,  ///< α = −gᵀg / gᵀAd, the choice that makes g_{k+1} ⟂ g_k
};

enum class BetaRule { FletcherReeves, HestenesStiefel, PolakRibierePolyak, DaiYuan };

enum class GradientUpdate {
  Recurrence,  ///< g_{k+1} = g_k + α_k·Ad_k, one matvec per iteration
  Explicit,    ///< g_{k+1} = A·x_{k+1} + b, a second matvec
};

enum class TerminationReason { GradientBelowTolerance, IterationCap, Breakdown };

std::string_view to_string(StepsizeRule rule);
std::string_view to_string(BetaRule rule);
std::string_view to_string(GradientUpdate mode);
std::string_view to_string(TerminationReason reason);

inline constexpr double kDefaultRelativeTolerance = 1e-12;
inline constexpr double kDefaultBreakdownThreshold = 1e-300;

struct SolverConfig {
  StepsizeRule stepsize = StepsizeRule::ExactLineSearch;
  BetaRule beta = BetaRule::FletcherReeves;
  GradientUpdate gradient_update = GradientUpdate::Recurrence;
  /// Stop once ‖g_k‖ ≤ relative_tolerance·‖g_0‖ ...
  double relative_tolerance = kDefaultRelativeTolerance;
  /// ... unless an absolute threshold is given, which then takes precedence.
  std::optional<double> absolute_tolerance;
  /// Defaults to the problem dimension.
  std::optional<std::size_t> max_iterations;
  bool record_trace = true;
  /// Also evaluate the non-selected stepsize rule each iteration (stored, never used to advance).
  bool evaluate_both_stepsizes = false;
  double breakdown_threshold = kDefaultBreakdownThreshold;

  /// Throws InvalidArgument on a negative tolerance or a zero iteration cap.
  void validate() const;
  double gradient_tolerance(double initial_gradient_norm) const;
  std::size_t iteration_cap(std::size_t dimension) const;
};

/// State of iteration k. d, Ad and alpha describe the step taken from x_k.
struct IterationRecord {
  std::size_t k = 0;
  Vector x;
  Vector g;
  Vector d;
  Vector ad;
  double alpha = 0.0;
  /// β_k, absent at k = 0.
  std::optional<double> beta;
  /// The other stepsize rule's value, when requested.
  std::optional<double> alpha_alternate;
};

/// Every step taken by a solve, plus the iterate the solve stopped at.
///
/// records[k] holds step k (x_k, g_k, d_k, Ad_k, α_k). The final iterate x_K, with
/// K = terminated_at, has no step and lives in final_x / final_g.
struct IterationTrace {
  std::vector<IterationRecord> records;
  Vector final_x;
  Vector final_g;
  std::size_t terminated_at = 0;
  TerminationReason reason = TerminationReason::GradientBelowTolerance;
  std::string breakdown_detail;
  double initial_gradient_norm = 0.0;
  double gradient_tolerance = 0.0;
  SolverConfig config;

  bool converged() const { return reason == TerminationReason::GradientBelowTolerance; }
  /// Gradients g_0 … g_K in order.
  std::vector<std::span<const double>> gradients() const;
};

struct SolveResult {
  Vector x;
  IterationTrace trace;
};

/// β_k from g_k, g_{k−1} and d_{k−1}. Throws BreakdownError when the rule's
/// denominator magnitude is ≤ threshold; k only labels the error.
double beta(BetaRule rule, std::span<const double> g, std::span<const double> g_prev,
            std::span<const double> d_prev, std::size_t k = 0,
            double threshold = kDefaultBreakdownThreshold);

/// d_0 = −g_0
Vector direction(std::span<const double> g);
/// d_k = −g_k + β_k·d_{k−1}
Vector direction(std::span<const double> g, double beta_k, std::span<const double> d_prev);

/// −gᵀd / dᵀAd. Throws BreakdownError when dᵀAd ≤ threshold.
double stepsize_exact(std::span<const double> g, std::span<const double> d,
                      std::span<const double> ad, std::size_t k = 0,
                      double threshold = kDefaultBreakdownThreshold);

/// −gᵀg / gᵀAd. Throws BreakdownError when |gᵀAd| ≤ threshold.
double stepsize_orthogonal(std::span<const double> g, std::span<const double> ad,
                           std::size_t k = 0, double threshold = kDefaultBreakdownThreshold);

double stepsize(StepsizeRule rule, std::span<const double> g, std::span<const double> d,
                std::span<const double> ad, std::size_t k = 0,
                double threshold = kDefaultBreakdownThreshold);

/// x_{k+1} and g_{k+1}, before any direction is formed.
struct Iterate {
  Vector x;
  Vector g;
};

/// Record 0 at x_0: g_0, d_0 = −g_0, Ad_0, α_0.
IterationRecord initial_record(const QuadraticProblem& problem, std::span<const double> x0,
                               const SolverConfig& config);

/// Moves along record's direction: x_{k+1} = x_k + α_k·d_k and g_{k+1} per config.gradient_update.
Iterate advance(const QuadraticProblem& problem, const IterationRecord& record,
                const SolverConfig& config);

/// Fills β_{k+1}, d_{k+1}, Ad_{k+1} and α_{k+1} for an iterate reached from prev.
IterationRecord complete_record(const QuadraticProblem& problem, Iterate next,
                                const IterationRecord& prev, const SolverConfig& config);

/// advance + complete_record. Throws InvalidArgument if record.g is zero, since
/// the caller must terminate before stepping from the minimizer.
IterationRecord step(const QuadraticProblem& problem, const IterationRecord& record,
                     const SolverConfig& config);

/// Runs until ‖g_k‖ ≤ tolerance, the iteration cap, or breakdown. Breakdown is
/// reported through trace.reason, never thrown.
SolveResult solve(const QuadraticProblem& problem, std::span<const double> x0,
                  const SolverConfig& config = {});
/// Starts from x_0 = 0.
SolveResult solve(const QuadraticProblem& problem, const SolverConfig& config = {});

}  // namespace lincg

#endif  // LINCG_CG_HPP
