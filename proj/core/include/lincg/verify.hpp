#ifndef LINCG_VERIFY_HPP
#define LINCG_VERIFY_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lincg/cg.hpp"
#include "lincg/linalg.hpp"

namespace lincg {

/// Identities certified from a trace. Each one is a separate check with its own worst violation.
enum class IdentityId {
  DescentIdentity,                 ///< g_iᵀd_i = −‖g_i‖²
  DirectionConjugacy,              ///< d_iᵀAd_j = 0, j < i
  GradientDirectionOrthogonality,  ///< g_iᵀd_j = 0, j < i
  GradientOrthogonality,           ///< g_iᵀg_j = 0, j < i
  GradientConjugacyAdjacent,       ///< g_{k+1}ᵀAg_k = −‖g_{k+1}‖²/α_k
  GradientConjugacyFar,            ///< g_{k+1}ᵀAg_i = 0, i ≤ k−1
  StepsizeEquivalence,             ///< −gᵀd/dᵀAd = −gᵀg/gᵀAd
  BetaAgreement,                   ///< FR = HS = PRP = DY
  TerminationWithinN,              ///< converged in at most n iterations
  SolutionAccuracy,                ///< x_final matches a direct Cholesky solve
};

std::string_view to_string(IdentityId id);
/// Throws InvalidArgument for unknown names.
IdentityId identity_from_string(std::string_view name);

struct IdentityResidual {
  IdentityId id = IdentityId::DescentIdentity;
  std::size_t i = 0;
  std::optional<std::size_t> j;
  double raw = 0.0;
  /// raw divided by the identity's natural scale; always finite.
  double normalized = 0.0;
  bool pass = true;
  /// Set for breakdowns and other irregular entries.
  std::string note;
};

struct CheckResult {
  IdentityId id = IdentityId::DescentIdentity;
  double tolerance = 0.0;
  std::vector<IdentityResidual> residuals;
  /// max |normalized| over residuals, 0 when there are none.
  double worst_violation = 0.0;
  bool passed = true;
};

enum class ToleranceRegime {
  Standard,  ///< well-conditioned input, default tolerance
  Relaxed,   ///< condition estimate above the relaxation threshold
  Custom,    ///< caller-supplied tolerance
};

std::string_view to_string(ToleranceRegime regime);

struct VerificationReport {
  std::vector<CheckResult> checks;
  ToleranceRegime regime = ToleranceRegime::Standard;
  double tolerance = 0.0;
  std::optional<double> condition_estimate;
  /// The converged final gradient is treated as zero and left out of pairwise checks.
  bool terminal_gradient_excluded = false;

  bool passed() const;
  const CheckResult* find(IdentityId id) const;
  /// worst_violation of the check, or 0 if it is absent.
  double worst(IdentityId id) const;
  void append(VerificationReport other);
};

inline constexpr double kStandardCheckTolerance = 1e-8;
inline constexpr double kRelaxedCheckTolerance = 1e-5;
inline constexpr double kRelaxationConditionThreshold = 1e4;

struct VerifyOptions {
  /// Overrides the regime-based choice when set.
  std::optional<double> tolerance;
  double standard_tolerance = kStandardCheckTolerance;
  double relaxed_tolerance = kRelaxedCheckTolerance;
  double relax_above_condition = kRelaxationConditionThreshold;
  /// ‖x − x_oracle‖/‖x_oracle‖ bound; defaults to the check tolerance.
  std::optional<double> solution_tolerance;
};

/// λ_max/λ_min from power iteration and Cholesky-based inverse iteration.
/// Infinite when the factorization fails.
double estimate_condition(const SpdMatrix& a);

struct ToleranceChoice {
  ToleranceRegime regime;
  double tolerance;
  std::optional<double> condition_estimate;
};

ToleranceChoice choose_tolerance(const SpdMatrix& a, const VerifyOptions& options = {});

// Every check throws IncompleteTraceError when the trace was not recorded
// (records.size() ≠ terminated_at) or a record lacks its cached vectors.

/// Descent, direction conjugacy, gradient/direction and gradient/gradient orthogonality.
VerificationReport check_classical_identities(const IterationTrace& trace, const SpdMatrix& a,
                                              double tolerance = kStandardCheckTolerance);

/// Adjacent and far-pair gradient conjugacy. One matvec per participating gradient;
/// the far-pair sweep is quadratic in trace length.
VerificationReport check_gradient_conjugacy(const IterationTrace& trace, const SpdMatrix& a,
                                            double tolerance = kStandardCheckTolerance);

/// |α_exact − α_orth| / α_exact per step, recomputed from the recorded g, d, Ad.
VerificationReport check_stepsize_equivalence(const IterationTrace& trace,
                                              double tolerance = kStandardCheckTolerance);

/// terminated_at ≤ n with a converged gradient, and agreement with a Cholesky solve of Ax = −b.
VerificationReport check_finite_termination(const IterationTrace& trace,
                                            const QuadraticProblem& problem,
                                            double tolerance = kStandardCheckTolerance,
                                            std::optional<double> solution_tolerance = {});

/// Max pairwise relative spread of FR, HS, PRP and DY recomputed at every recorded k ≥ 1,
/// i.e. each β that formed a search direction.
VerificationReport check_beta_agreement(const IterationTrace& trace,
                                        double tolerance = kStandardCheckTolerance);

/// All five checks at the tolerance picked by choose_tolerance.
VerificationReport verify_trace(const IterationTrace& trace, const QuadraticProblem& problem,
                                const VerifyOptions& options = {});

}  // namespace lincg

#endif  // LINCG_VERIFY_HPP
