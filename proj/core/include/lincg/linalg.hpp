#ifndef LINCG_LINALG_HPP
#define LINCG_LINALG_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace lincg {

using Vector = std::vector<double>;

/// Plain left-to-right 64-bit accumulation of Σ u_i v_i. Throws DimensionError on length mismatch.
double dot(std::span<const double> u, std::span<const double> v);

double norm(std::span<const double> v);

/// y ← y + a·x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// Returns x + a·y.
Vector add_scaled(std::span<const double> x, double a, std::span<const double> y);

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Square real matrix held either densely (row-major) or in compressed sparse row form.
///
/// CSR rows keep strictly increasing column indices; both triangles of a symmetric
/// matrix are stored. Dense and CSR products of the same matrix agree bit for bit
/// because the dense kernel visits columns in the same order and the skipped terms
/// are exact zeros.
class Matrix {
 public:
  enum class Storage { Dense, Csr };

  static Matrix dense(std::size_t n, std::vector<double> row_major);
  static Matrix csr(std::size_t n, std::vector<std::size_t> row_offsets,
                    std::vector<std::size_t> col_indices, std::vector<double> values);
  /// Builds CSR storage; duplicate (row, col) entries are summed, explicit zeros dropped.
  static Matrix from_triplets(std::size_t n, std::span<const Triplet> entries);
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t order() const { return n_; }
  Storage storage() const;
  std::size_t stored_entries() const;

  double at(std::size_t i, std::size_t j) const;
  std::vector<double> to_dense() const;
  Matrix to_csr() const;
  Matrix to_dense_matrix() const;
  Matrix scaled(double c) const;

  double max_abs() const;
  double frobenius_norm() const;

  /// y ← A·x
  void multiply(std::span<const double> x, std::span<double> y) const;

  /// Visits stored entries in row-major order as f(row, col, value).
  template <class F>
  void for_each_entry(F&& f) const {
    if (const auto* d = std::get_if<DenseStorage>(&storage_)) {
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) f(i, j, d->values[i * n_ + j]);
    } else {
      const auto& s = std::get<CsrStorage>(storage_);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t p = s.row_offsets[i]; p < s.row_offsets[i + 1]; ++p)
          f(i, s.col_indices[p], s.values[p]);
    }
  }

 private:
  struct DenseStorage {
    std::vector<double> values;
  };
  struct CsrStorage {
    std::vector<std::size_t> row_offsets;
    std::vector<std::size_t> col_indices;
    std::vector<double> values;
  };

  Matrix(std::size_t n, std::variant<DenseStorage, CsrStorage> storage)
      : n_(n), storage_(std::move(storage)) {}

  std::size_t n_ = 0;
  std::variant<DenseStorage, CsrStorage> storage_;
};

Vector matvec(const Matrix& a, std::span<const double> x);

/// Densified orders up to this limit are validated by factorization.
inline constexpr std::size_t kDensifyLimit = 2000;

struct SpdValidationOptions {
  std::size_t densify_limit = kDensifyLimit;
  std::size_t probe_count = 32;
  std::uint64_t probe_seed = 0x9e3779b97f4a7c15ULL;
};

enum class SpdMethod { Cholesky, RandomProbes };

struct SpdCertificate {
  SpdMethod method = SpdMethod::Cholesky;
  /// True when only random probes were used; positive definiteness is then likely, not proven.
  bool probable = false;
  /// Smallest Cholesky pivot, or the smallest probe Rayleigh quotient.
  double min_pivot = 0.0;
};

/// 1e-12·max|A_ij|
double symmetry_tolerance(const Matrix& a);

/// Throws SymmetryError when some |A_ij − A_ji| exceeds symmetry_tolerance(a).
void check_symmetric(const Matrix& a);

/// Throws SymmetryError or NotPositiveDefiniteError. Sparse matrices above the
/// densify limit fall back to probe_count random Rayleigh quotients.
SpdCertificate spd_validate(const Matrix& a, const SpdValidationOptions& options = {});

/// A matrix that passed spd_validate. Entries are exactly symmetric: pairs that
/// differed within tolerance are averaged at construction.
class SpdMatrix {
 public:
  static SpdMatrix validate(const Matrix& a, const SpdValidationOptions& options = {});

  const Matrix& matrix() const { return matrix_; }
  std::size_t order() const { return matrix_.order(); }
  const SpdCertificate& certificate() const { return certificate_; }

  void multiply(std::span<const double> x, std::span<double> y) const { matrix_.multiply(x, y); }
  /// (cA) for c > 0, still SPD.
  SpdMatrix scaled(double c) const;

 private:
  SpdMatrix(Matrix m, SpdCertificate c) : matrix_(std::move(m)), certificate_(c) {}

  Matrix matrix_;
  SpdCertificate certificate_;
};

Vector matvec(const SpdMatrix& a, std::span<const double> x);

/// Dense lower-triangular Cholesky factor A = L·Lᵀ.
class CholeskyFactor {
 public:
  /// Throws NotPositiveDefiniteError on the first pivot ≤ 0.
  static CholeskyFactor factor(const Matrix& a);

  std::size_t order() const { return n_; }
  double min_pivot() const { return min_pivot_; }
  Vector solve(std::span<const double> rhs) const;

 private:
  CholeskyFactor(std::size_t n, std::vector<double> lower, double min_pivot)
      : n_(n), lower_(std::move(lower)), min_pivot_(min_pivot) {}

  std::size_t n_;
  std::vector<double> lower_;
  double min_pivot_;
};

enum class SpectrumDistribution { LogUniform, Linear, Clustered };

/// Eigenvalues for generate_spd: an explicit list, or a range filled deterministically.
///
/// LogUniform spaces eigenvalues geometrically and Linear evenly, both hitting the
/// endpoints exactly. Clustered splits them into three tight groups near λ_min,
/// √(λ_min·λ_max) and λ_max.
class SpectrumSpec {
 public:
  static SpectrumSpec explicit_values(std::vector<double> eigenvalues);
  static SpectrumSpec range(double lambda_min, double lambda_max,
                            SpectrumDistribution distribution = SpectrumDistribution::LogUniform);

  /// Throws SpecError on a wrong count (explicit lists) or an invalid range.
  std::vector<double> eigenvalues(std::size_t n) const;

 private:
  struct Range {
    double lambda_min;
    double lambda_max;
    SpectrumDistribution distribution;
  };
  explicit SpectrumSpec(std::variant<std::vector<double>, Range> v) : spec_(std::move(v)) {}

  std::variant<std::vector<double>, Range> spec_;
};

/// Column-orthonormal n×n matrix (row-major) from a seeded Gaussian matrix,
/// orthonormalized by Gram-Schmidt with one re-orthogonalization pass.
std::vector<double> random_orthogonal(std::size_t n, std::uint64_t seed);

/// Q·Λ·Qᵀ with Q = random_orthogonal(n, seed). Deterministic for fixed arguments.
SpdMatrix generate_spd(std::size_t n, const SpectrumSpec& spec, std::uint64_t seed);

}  // namespace lincg

#endif  // LINCG_LINALG_HPP
