#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "lincg/errors.hpp"
#include "lincg/verify.hpp"
#include "oracles/eigen_oracle.hpp"
#include "worked_instance.hpp"

namespace lincg {
namespace {

IterationTrace worked_trace() { return solve(worked::problem()).trace; }

QuadraticProblem random_problem(std::size_t n, double cond, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 104729);
  std::normal_distribution<double> normal;
  Vector b(n);
  for (double& v : b) v = normal(rng);
  return QuadraticProblem(generate_spd(n, SpectrumSpec::range(1.0, cond), seed), b);
}

const IdentityResidual* residual(const VerificationReport& r, IdentityId id, std::size_t i,
                                 std::optional<std::size_t> j = {}) {
  const CheckResult* c = r.find(id);
  if (c == nullptr) return nullptr;
  for (const auto& res : c->residuals)
    if (res.i == i && res.j == j) return &res;
  return nullptr;
}

TEST(ClassicalIdentities, WorkedTrace) {
  const auto trace = worked_trace();
  const auto p = worked::problem();
  const auto report = check_classical_identities(trace, p.matrix());
  EXPECT_TRUE(report.passed());

  const auto* conj = residual(report, IdentityId::DirectionConjugacy, 1, 0);
  ASSERT_NE(conj, nullptr);
  EXPECT_LE(std::abs(conj->normalized), 1e-15);
  const auto* orth = residual(report, IdentityId::GradientOrthogonality, 1, 0);
  ASSERT_NE(orth, nullptr);
  EXPECT_LE(std::abs(orth->normalized), 1e-15);
  EXPECT_TRUE(report.terminal_gradient_excluded);
}

TEST(ClassicalIdentities, OneDimensionalHasOnlyDescent) {
  const QuadraticProblem p(SpdMatrix::validate(Matrix::diagonal(Vector{4.0})), {-3.0});
  const auto trace = solve(p).trace;
  ASSERT_EQ(trace.terminated_at, 1u);
  const auto report = check_classical_identities(trace, p.matrix());
  const auto* descent = report.find(IdentityId::DescentIdentity);
  ASSERT_NE(descent, nullptr);
  ASSERT_EQ(descent->residuals.size(), 1u);
  EXPECT_EQ(descent->residuals[0].normalized, 0.0);
  for (IdentityId id : {IdentityId::DirectionConjugacy, IdentityId::GradientDirectionOrthogonality,
                        IdentityId::GradientOrthogonality}) {
    const auto* c = report.find(id);
    ASSERT_NE(c, nullptr);
    EXPECT_TRUE(c->residuals.empty());
  }
}

TEST(GradientConjugacy, WorkedTraceAdjacent) {
  const auto report = check_gradient_conjugacy(worked_trace(), worked::problem().matrix());
  const auto* adj = residual(report, IdentityId::GradientConjugacyAdjacent, 1, 0);
  ASSERT_NE(adj, nullptr);
  EXPECT_LE(std::abs(adj->normalized), 1e-15);
  EXPECT_TRUE(report.passed());
}

TEST(GradientConjugacy, ZeroNextGradientGivesZeroResidual) {
  // A = 2I reaches g_1 = 0 exactly. Relabel the stop as a cap so g_1 takes part.
  const QuadraticProblem p(SpdMatrix::validate(Matrix::diagonal(Vector{2, 2})), {-2, -4});
  auto trace = solve(p).trace;
  ASSERT_EQ(norm(trace.final_g), 0.0);
  trace.reason = TerminationReason::IterationCap;
  const auto report = check_gradient_conjugacy(trace, p.matrix());
  EXPECT_FALSE(report.terminal_gradient_excluded);
  const auto* adj = residual(report, IdentityId::GradientConjugacyAdjacent, 1, 0);
  ASSERT_NE(adj, nullptr);
  EXPECT_EQ(adj->raw, 0.0);
  EXPECT_EQ(adj->normalized, 0.0);
}

TEST(GradientConjugacy, EmptyTraceIsIncomplete) {
  const auto trace = solve(worked::problem(), Vector{1, 1}).trace;
  EXPECT_THROW(check_gradient_conjugacy(trace, worked::problem().matrix()), IncompleteTraceError);
}

TEST(GradientConjugacy, FarPairsSeededInstance) {
  const auto p = random_problem(30, 50.0, 3);
  const auto report = check_gradient_conjugacy(solve(p).trace, p.matrix());
  const double far = report.worst(IdentityId::GradientConjugacyFar);
  RecordProperty("far_pair_worst", std::to_string(far));
  EXPECT_LE(far, 1e-8) << "finite-precision loss of global conjugacy: " << far;
}

TEST(StepsizeEquivalence, WorkedTrace) {
  const auto report = check_stepsize_equivalence(worked_trace());
  const auto* c = report.find(IdentityId::StepsizeEquivalence);
  ASSERT_NE(c, nullptr);
  ASSERT_EQ(c->residuals.size(), 2u);
  EXPECT_LE(c->residuals[0].normalized, 1e-16);
  EXPECT_LE(c->residuals[1].normalized, 1e-16);
}

TEST(StepsizeEquivalence, IdentityMatrix) {
  const QuadraticProblem p(SpdMatrix::validate(Matrix::identity(4)), {1, -2, 3, 0.5});
  const auto report = check_stepsize_equivalence(solve(p).trace);
  EXPECT_EQ(report.worst(IdentityId::StepsizeEquivalence), 0.0);
}

TEST(FiniteTermination, WorkedInstance) {
  const auto trace = worked_trace();
  EXPECT_EQ(trace.terminated_at, 2u);
  // Zero in exact arithmetic (oracle_test); here only rounding remains.
  EXPECT_LE(norm(trace.final_g), 1e-15 * trace.initial_gradient_norm);
  EXPECT_TRUE(check_finite_termination(trace, worked::problem()).passed());
}

TEST(FiniteTermination, ScaledIdentityOneStep) {
  for (std::size_t n : {1u, 7u, 40u}) {
    Vector b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = std::sin(1.0 + static_cast<double>(i));
    const QuadraticProblem p(SpdMatrix::validate(Matrix::diagonal(Vector(n, 3.5))), b);
    const auto trace = solve(p).trace;
    EXPECT_EQ(trace.terminated_at, 1u);
    EXPECT_TRUE(check_finite_termination(trace, p).passed());
  }
}

TEST(FiniteTermination, ThreeDistinctEigenvalues) {
  Vector eigs;
  for (std::size_t i = 0; i < 10; ++i) eigs.push_back(std::vector<double>{1.0, 4.0, 9.0}[i % 3]);
  Vector b(10);
  for (std::size_t i = 0; i < 10; ++i) b[i] = 1.0 + 0.1 * static_cast<double>(i);
  const QuadraticProblem p(SpdMatrix::validate(Matrix::diagonal(eigs)), b);
  const auto trace = solve(p).trace;
  EXPECT_LE(trace.terminated_at, 3u);
  const auto report = check_finite_termination(trace, p, kStandardCheckTolerance, 1e-10);
  EXPECT_TRUE(report.passed());
}

TEST(FiniteTermination, CapReportedAsFailure) {
  SolverConfig c;
  c.max_iterations = 2;
  const auto p = random_problem(10, 100.0, 0);
  const auto report = check_finite_termination(solve(p, c).trace, p);
  EXPECT_FALSE(report.passed());
}

TEST(BetaAgreement, WorkedTrace) {
  const auto report = check_beta_agreement(worked_trace());
  const auto* c = report.find(IdentityId::BetaAgreement);
  ASSERT_NE(c, nullptr);
  ASSERT_EQ(c->residuals.size(), 1u);
  EXPECT_LE(c->residuals[0].normalized, 1e-15);
}

TEST(Tolerance, RegimeSelection) {
  const auto well = choose_tolerance(SpdMatrix::validate(Matrix::diagonal(Vector{1, 100})));
  EXPECT_EQ(well.regime, ToleranceRegime::Standard);
  EXPECT_EQ(well.tolerance, kStandardCheckTolerance);
  ASSERT_TRUE(well.condition_estimate.has_value());
  EXPECT_NEAR(*well.condition_estimate, 100.0, 1e-6);

  const auto ill = choose_tolerance(SpdMatrix::validate(Matrix::diagonal(Vector{1e-3, 1e3})));
  EXPECT_EQ(ill.regime, ToleranceRegime::Relaxed);
  EXPECT_EQ(ill.tolerance, kRelaxedCheckTolerance);

  VerifyOptions custom;
  custom.tolerance = 1e-3;
  EXPECT_EQ(choose_tolerance(SpdMatrix::validate(Matrix::identity(2)), custom).regime,
            ToleranceRegime::Custom);
}

TEST(Tolerance, ConditionEstimateMatchesEigensolve) {
  const auto a = generate_spd(40, SpectrumSpec::range(1.0, 300.0), 12);
  EXPECT_NEAR(estimate_condition(a), oracle::condition_number(a.matrix()), 1e-3 * 300.0);
}

TEST(Report, UnrecordedTraceIsIncomplete) {
  SolverConfig c;
  c.record_trace = false;
  const auto trace = solve(worked::problem(), c).trace;
  EXPECT_THROW(verify_trace(trace, worked::problem()), IncompleteTraceError);
  EXPECT_THROW(check_stepsize_equivalence(trace), IncompleteTraceError);
}

TEST(Report, IdentityNamesRoundTrip) {
  for (IdentityId id :
       {IdentityId::DescentIdentity, IdentityId::DirectionConjugacy,
        IdentityId::GradientDirectionOrthogonality, IdentityId::GradientOrthogonality,
        IdentityId::GradientConjugacyAdjacent, IdentityId::GradientConjugacyFar,
        IdentityId::StepsizeEquivalence, IdentityId::BetaAgreement, IdentityId::TerminationWithinN,
        IdentityId::SolutionAccuracy})
    EXPECT_EQ(identity_from_string(to_string(id)), id);
  EXPECT_THROW(identity_from_string("nope"), InvalidArgument);
}

TEST(Report, PassFlagsConsistent) {
  const auto p = random_problem(50, 100.0, 21);
  const auto report = verify_trace(solve(p).trace, p);
  bool all = true;
  for (const auto& c : report.checks) {
    bool check_ok = true;
    for (const auto& r : c.residuals) {
      EXPECT_TRUE(std::isfinite(r.normalized));
      EXPECT_EQ(r.pass, std::abs(r.normalized) <= c.tolerance);
      check_ok = check_ok && r.pass;
    }
    EXPECT_EQ(c.passed, check_ok);
    all = all && c.passed;
  }
  EXPECT_EQ(report.passed(), all);
}

TEST(Report, HilbertDegradationFlagged) {
  std::vector<double> h(144);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) h[i * 12 + j] = 1.0 / static_cast<double>(i + j + 1);
  const auto a = SpdMatrix::validate(Matrix::dense(12, h));
  const QuadraticProblem p(a, Vector(12, 1.0));
  const auto report = verify_trace(solve(p).trace, p);
  EXPECT_EQ(report.regime, ToleranceRegime::Relaxed);
  EXPECT_FALSE(report.passed());
}

// Iterates of (cA, cb) against (A, b), worst relative gap ‖Δx_k‖/‖x_k‖ over all common k.
double scaling_gap(const QuadraticProblem& p, double c) {
  const auto base = solve(p).trace;
  const auto scaled = solve(p.scaled(c)).trace;
  const std::size_t common = std::min(base.records.size(), scaled.records.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < common; ++k) {
    const Vector diff = add_scaled(scaled.records[k].x, -1.0, base.records[k].x);
    const double len = norm(base.records[k].x);
    if (len > 0.0) worst = std::max(worst, norm(diff) / len);
  }
  return worst;
}

TEST(ScalingCovariance, PowerOfTwoIsBitIdentical) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto p = random_problem(20 + 10 * seed, 100.0, seed);
    EXPECT_EQ(scaling_gap(p, 1024.0), 0.0);
    EXPECT_EQ(scaling_gap(p, 1.0 / 1024.0), 0.0);
  }
}

TEST(ScalingCovariance, DecimalFactors) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto p = random_problem(8 + seed % 30, 100.0, seed);
    for (double c : {1e-3, 1e3}) worst = std::max(worst, scaling_gap(p, c));
  }
  RecordProperty("worst_relative_gap", std::to_string(worst));
  EXPECT_LE(worst, 1e-10) << "rounding of cA perturbs the trajectory; gap " << worst;
}

TEST(Report, WellConditionedTracesPassAllChecks) {
  std::ostringstream failures;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto p = random_problem(10 + seed % 50, 100.0, seed);
    const auto report = verify_trace(solve(p).trace, p);
    for (const auto& c : report.checks)
      if (!c.passed)
        failures << "seed " << seed << ' ' << to_string(c.id) << ' ' << c.worst_violation << '\n';
  }
  EXPECT_TRUE(failures.str().empty()) << failures.str();
}

// --- properties ------------------------------------------------------------------------

class VerifyProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(VerifyProperty, ChecksAreRepeatable) {
  const std::uint64_t seed = GetParam();
  const auto p = random_problem(10 + seed % 20, 100.0, seed);
  const auto trace = solve(p).trace;
  const auto a = verify_trace(trace, p);
  const auto b = verify_trace(trace, p);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t c = 0; c < a.checks.size(); ++c) {
    ASSERT_EQ(a.checks[c].residuals.size(), b.checks[c].residuals.size());
    EXPECT_EQ(std::memcmp(&a.checks[c].worst_violation, &b.checks[c].worst_violation,
                          sizeof(double)),
              0);
    for (std::size_t r = 0; r < a.checks[c].residuals.size(); ++r) {
      const auto& x = a.checks[c].residuals[r];
      const auto& y = b.checks[c].residuals[r];
      EXPECT_EQ(std::memcmp(&x.raw, &y.raw, sizeof(double)), 0);
      EXPECT_EQ(std::memcmp(&x.normalized, &y.normalized, sizeof(double)), 0);
    }
  }
}

TEST_P(VerifyProperty, LocalChecksPass) {
  const std::uint64_t seed = GetParam();
  const auto p = random_problem(10 + seed % 50, 100.0, seed);
  const auto trace = solve(p).trace;
  EXPECT_TRUE(check_stepsize_equivalence(trace).passed());
  EXPECT_TRUE(check_beta_agreement(trace).passed());
  const auto classical = check_classical_identities(trace, p.matrix());
  EXPECT_LE(classical.worst(IdentityId::DescentIdentity), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Seeds, VerifyProperty, ::testing::Range<std::uint64_t>(0, 12));

}  // namespace
}  // namespace lincg
