#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lincg/errors.hpp"
#include "lincg/linalg.hpp"
#include "oracles/eigen_oracle.hpp"

namespace lincg {
namespace {

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (double& e : v) e = normal(rng);
  return v;
}

TEST(Dot, Examples) {
  EXPECT_EQ(dot(Vector{1, 0}, Vector{0, 1}), 0.0);
  EXPECT_EQ(dot(Vector{2, 1}, Vector{2, 1}), 5.0);
  EXPECT_EQ(dot(Vector{-2, -1}, Vector{2, 1}), -5.0);
}

TEST(Dot, LengthMismatchIsDimensionError) {
  EXPECT_THROW(dot(Vector{1, 2}, Vector{1}), DimensionError);
}

TEST(Matvec, Examples) {
  EXPECT_EQ(matvec(Matrix::identity(2), Vector{3, 4}), (Vector{3, 4}));
  const Matrix d = Matrix::diagonal(Vector{2, 1});
  EXPECT_EQ(matvec(d, Vector{2, 1}), (Vector{4, 1}));
  const Vector y = matvec(d, Vector{-10.0 / 81, 40.0 / 81});
  EXPECT_DOUBLE_EQ(y[0], -20.0 / 81);
  EXPECT_DOUBLE_EQ(y[1], 40.0 / 81);
}

TEST(Matvec, DimensionMismatch) {
  EXPECT_THROW(matvec(Matrix::identity(3), Vector{1, 2}), DimensionError);
}

TEST(Matrix, ConstructionRejectsBadInput) {
  EXPECT_THROW(Matrix::dense(2, {1, 2, 3}), DimensionError);
  EXPECT_THROW(Matrix::dense(1, {NAN}), InvalidArgument);
  EXPECT_THROW(Matrix::csr(2, {0, 1, 2}, {1, 0}, {1.0}), DimensionError);
  EXPECT_THROW(Matrix::csr(2, {0, 2, 2}, {1, 0}, {1.0, 2.0}), InvalidArgument);
  const std::vector<Triplet> out_of_range = {{0, 2, 1.0}};
  EXPECT_THROW(Matrix::from_triplets(2, out_of_range), DimensionError);
}

TEST(Matrix, TripletsSumDuplicatesAndDropZeros) {
  const std::vector<Triplet> t = {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 5.0}, {1, 0, -5.0}, {1, 1, 4.0}};
  const Matrix m = Matrix::from_triplets(2, t);
  EXPECT_EQ(m.stored_entries(), 2u);
  EXPECT_EQ(m.at(0, 0), 3.0);
  EXPECT_EQ(m.at(1, 0), 0.0);
  EXPECT_EQ(m.at(1, 1), 4.0);
}

TEST(SpdValidate, Examples) {
  EXPECT_NO_THROW(spd_validate(Matrix::diagonal(Vector{2, 1})));
  EXPECT_THROW(spd_validate(Matrix::dense(2, {1, 2, 2, 1})), NotPositiveDefiniteError);
  EXPECT_THROW(spd_validate(Matrix::dense(2, {1, 0, 1, 1})), SymmetryError);
}

TEST(SpdValidate, SymmetryToleranceIsRelativeToLargestEntry) {
  const double big = 1e6;
  EXPECT_NO_THROW(check_symmetric(Matrix::dense(2, {big, 1.0, 1.0 + 1e-7, big})));
  EXPECT_THROW(check_symmetric(Matrix::dense(2, {big, 1.0, 1.0 + 1e-5, big})), SymmetryError);
}

TEST(SpdValidate, SparseAsymmetryDetected) {
  const std::vector<Triplet> t = {{0, 0, 2.0}, {1, 1, 2.0}, {0, 1, 1.0}};
  EXPECT_THROW(spd_validate(Matrix::from_triplets(2, t)), SymmetryError);
}

TEST(SpdValidate, LargeSparseFallsBackToProbes) {
  const std::size_t n = 40;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i + 1 < n) {
      t.push_back({i, i + 1, -1.0});
      t.push_back({i + 1, i, -1.0});
    }
  }
  SpdValidationOptions opts;
  opts.densify_limit = 10;
  opts.probe_count = 5;  // raised to the minimum of 20
  const auto cert = spd_validate(Matrix::from_triplets(n, t), opts);
  EXPECT_EQ(cert.method, SpdMethod::RandomProbes);
  EXPECT_TRUE(cert.probable);
  EXPECT_GT(cert.min_pivot, 0.0);

  const auto dense_cert = spd_validate(Matrix::from_triplets(n, t));
  EXPECT_EQ(dense_cert.method, SpdMethod::Cholesky);
  EXPECT_FALSE(dense_cert.probable);
}

TEST(SpdValidate, ProbesCatchIndefiniteSparse) {
  const std::size_t n = 30;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, -1.0});
  SpdValidationOptions opts;
  opts.densify_limit = 10;
  EXPECT_THROW(spd_validate(Matrix::from_triplets(n, t), opts), NotPositiveDefiniteError);
}

TEST(SpdMatrix, SymmetrizesWithinTolerance) {
  const SpdMatrix a = SpdMatrix::validate(Matrix::dense(2, {2.0, 0.5, 0.5 + 1e-14, 1.0}));
  EXPECT_EQ(a.matrix().at(0, 1), a.matrix().at(1, 0));
}

TEST(Cholesky, SolveMatchesEigen) {
  const SpdMatrix a = generate_spd(12, SpectrumSpec::range(0.5, 40.0), 11);
  std::mt19937_64 rng(3);
  const Vector rhs = random_vector(12, rng);
  const Vector x = CholeskyFactor::factor(a.matrix()).solve(rhs);
  const Vector ref = oracle::direct_solve(a.matrix(), rhs);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], ref[i], 1e-12 * norm(ref));
}

TEST(Spectrum, Distributions) {
  const auto log = SpectrumSpec::range(1, 100).eigenvalues(5);
  EXPECT_EQ(log.front(), 1.0);
  EXPECT_EQ(log.back(), 100.0);
  EXPECT_NEAR(log[2], 10.0, 1e-12);

  const auto lin = SpectrumSpec::range(1, 9, SpectrumDistribution::Linear).eigenvalues(5);
  EXPECT_EQ(lin, (std::vector<double>{1, 3, 5, 7, 9}));

  const auto clustered =
      SpectrumSpec::range(1, 100, SpectrumDistribution::Clustered).eigenvalues(9);
  EXPECT_TRUE(std::is_sorted(clustered.begin(), clustered.end()));
  EXPECT_EQ(clustered.front(), 1.0);
  EXPECT_EQ(clustered.back(), 100.0);
  for (double v : clustered) {
    const bool near_low = v >= 1.0 && v <= 1.01;
    const bool near_mid = std::abs(v / 10.0 - 1.0) <= 0.005 + 1e-12;
    const bool near_high = v >= 99.0 && v <= 100.0;
    EXPECT_TRUE(near_low || near_mid || near_high) << v;
  }
}

TEST(Spectrum, InvalidSpecs) {
  EXPECT_THROW(SpectrumSpec::explicit_values({1.0, 0.0}), SpecError);
  EXPECT_THROW(SpectrumSpec::explicit_values({-2.0}), SpecError);
  EXPECT_THROW(SpectrumSpec::range(0.0, 1.0), SpecError);
  EXPECT_THROW(SpectrumSpec::range(5.0, 1.0), SpecError);
  EXPECT_THROW(SpectrumSpec::explicit_values({1.0, 2.0}).eigenvalues(3), SpecError);
}

TEST(GenerateSpd, OneByOneIsTheEigenvalue) {
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const SpdMatrix a = generate_spd(1, SpectrumSpec::explicit_values({3.0}), seed);
    EXPECT_EQ(a.matrix().at(0, 0), 3.0);
  }
}

TEST(GenerateSpd, TwoByTwoSimilarityInvariants) {
  for (std::uint64_t seed : {0u, 5u, 42u}) {
    const SpdMatrix spd = generate_spd(2, SpectrumSpec::explicit_values({2.0, 1.0}), seed);
    const Matrix& a = spd.matrix();
    EXPECT_NEAR(a.at(0, 0) + a.at(1, 1), 3.0, 1e-14);
    EXPECT_NEAR(a.at(0, 0) * a.at(1, 1) - a.at(0, 1) * a.at(1, 0), 2.0, 1e-14);
  }
}

TEST(GenerateSpd, PlantedSpectrumMatchesEigensolve) {
  const SpdMatrix a = generate_spd(50, SpectrumSpec::range(1.0, 100.0), 7);
  const auto ev = oracle::eigenvalues(a.matrix());
  const auto planted = SpectrumSpec::range(1.0, 100.0).eigenvalues(50);
  EXPECT_GE(ev.front(), 1.0 - 1e-12);
  EXPECT_LE(ev.back(), 100.0 + 1e-10);
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], planted[i], 1e-12 * 100.0);
}

TEST(GenerateSpd, DeterministicPerSeed) {
  const auto spec = SpectrumSpec::range(1.0, 10.0);
  EXPECT_EQ(generate_spd(8, spec, 4).matrix().to_dense(), generate_spd(8, spec, 4).matrix().to_dense());
  EXPECT_NE(generate_spd(8, spec, 4).matrix().to_dense(), generate_spd(8, spec, 5).matrix().to_dense());
}

TEST(RandomOrthogonal, ColumnsOrthonormal) {
  const std::size_t n = 60;
  const auto q = random_orthogonal(n, 17);
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += q[i * n + a] * q[i * n + b];
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  EXPECT_LE(worst, 1e-14);
}

// --- properties over seeded families -------------------------------------------------

class LinalgProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(LinalgProperty, MatvecSymmetry) {
  const std::uint64_t seed = GetParam();
  std::mt19937_64 rng(seed);
  const std::size_t n = 5 + seed % 40;
  const SpdMatrix a = generate_spd(n, SpectrumSpec::range(0.1, 1e3), seed);
  const double fro = a.matrix().frobenius_norm();
  for (int trial = 0; trial < 5; ++trial) {
    const Vector u = random_vector(n, rng);
    const Vector v = random_vector(n, rng);
    const double lhs = dot(u, matvec(a, v));
    const double rhs = dot(v, matvec(a, u));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * norm(u) * norm(v) * fro);
  }
}

TEST_P(LinalgProperty, DenseAndCsrAgree) {
  const std::uint64_t seed = GetParam();
  std::mt19937_64 rng(seed + 1000);
  const std::size_t n = 3 + seed % 30;
  // Banded SPD matrix so CSR genuinely skips entries.
  std::vector<Triplet> t;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 10.0 + u(rng)});
    for (std::size_t off = 1; off <= 2 && i + off < n; ++off) {
      const double v = u(rng);
      t.push_back({i, i + off, v});
      t.push_back({i + off, i, v});
    }
  }
  const Matrix csr = Matrix::from_triplets(n, t);
  const Matrix dense = csr.to_dense_matrix();
  const Vector x = random_vector(n, rng);
  const Vector y_csr = matvec(csr, x);
  const Vector y_dense = matvec(dense, x);
  for (std::size_t i = 0; i < n; ++i)
    EXPECT_LE(std::abs(y_csr[i] - y_dense[i]), 1e-14 * std::abs(y_dense[i]));
  EXPECT_EQ(dense.to_csr().to_dense(), csr.to_dense());
}

TEST_P(LinalgProperty, GeneratedTraceMatchesSpectrum) {
  const std::uint64_t seed = GetParam();
  const std::size_t n = 2 + seed % 25;
  const auto spec = SpectrumSpec::range(0.5, 50.0, static_cast<SpectrumDistribution>(seed % 3));
  const auto eigs = spec.eigenvalues(n);
  const SpdMatrix a = generate_spd(n, spec, seed);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += a.matrix().at(i, i);
  const double expected = std::accumulate(eigs.begin(), eigs.end(), 0.0);
  EXPECT_LE(std::abs(trace - expected), 1e-10 * expected);
  EXPECT_NO_THROW(spd_validate(a.matrix()));
}

INSTANTIATE_TEST_SUITE_P(Seeds, LinalgProperty, ::testing::Range<std::uint64_t>(0, 25));

}  // namespace
}  // namespace lincg
