#include "lincg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "lincg/errors.hpp"

namespace lincg {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": length " + std::to_string(a) + " vs " +
                         std::to_string(b));
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

}  // namespace

double dot(std::span<const double> u, std::span<const double> v) {
  require_same_length(u.size(), v.size(), "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
  return sum;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  require_same_length(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector add_scaled(std::span<const double> x, double a, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "add_scaled");
  Vector out(x.begin(), x.end());
  axpy(a, y, out);
  return out;
}

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::dense(std::size_t n, std::vector<double> row_major) {
  if (n == 0) throw InvalidArgument("matrix order must be positive");
  if (row_major.size() != n * n)
    throw DimensionError("dense matrix of order " + std::to_string(n) + " needs " +
                         std::to_string(n * n) + " entries, got " +
                         std::to_string(row_major.size()));
  require_finite(row_major, "dense matrix");
  return Matrix(n, DenseStorage{std::move(row_major)});
}

Matrix Matrix::csr(std::size_t n, std::vector<std::size_t> row_offsets,
                   std::vector<std::size_t> col_indices, std::vector<double> values) {
  if (n == 0) throw InvalidArgument("matrix order must be positive");
  if (row_offsets.size() != n + 1) throw DimensionError("CSR row offsets must have n+1 entries");
  if (col_indices.size() != values.size())
    throw DimensionError("CSR column and value arrays differ in length");
  if (row_offsets.front() != 0 || row_offsets.back() != values.size())
    throw InvalidArgument("CSR row offsets must start at 0 and end at nnz");
  for (std::size_t i = 0; i < n; ++i) {
    if (row_offsets[i] > row_offsets[i + 1])
      throw InvalidArgument("CSR row offsets must be nondecreasing");
    for (std::size_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
      if (col_indices[p] >= n) throw DimensionError("CSR column index out of range");
      if (p > row_offsets[i] && col_indices[p] <= col_indices[p - 1])
        throw InvalidArgument("CSR columns must be strictly increasing within a row");
    }
  }
  require_finite(values, "CSR matrix");
  return Matrix(n, CsrStorage{std::move(row_offsets), std::move(col_indices), std::move(values)});
}

Matrix Matrix::from_triplets(std::size_t n, std::span<const Triplet> entries) {
  if (n == 0) throw InvalidArgument("matrix order must be positive");
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  for (const auto& t : sorted)
    if (t.row >= n || t.col >= n) throw DimensionError("triplet index out of range");
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (std::size_t p = 0; p < sorted.size();) {
    const std::size_t r = sorted[p].row;
    const std::size_t c = sorted[p].col;
    double sum = 0.0;
    for (; p < sorted.size() && sorted[p].row == r && sorted[p].col == c; ++p)
      sum += sorted[p].value;
    if (sum != 0.0) {
      cols.push_back(c);
      vals.push_back(sum);
      ++offsets[r + 1];
    }
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  return csr(n, std::move(offsets), std::move(cols), std::move(vals));
}

Matrix Matrix::identity(std::size_t n) {
  const std::vector<double> ones(n, 1.0);
  return diagonal(ones);
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  const std::size_t n = diag.size();
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = i + 1;
    cols[i] = i;
  }
  return csr(n, std::move(offsets), std::move(cols), std::vector<double>(diag.begin(), diag.end()));
}

Matrix::Storage Matrix::storage() const {
  return std::holds_alternative<DenseStorage>(storage_) ? Storage::Dense : Storage::Csr;
}

std::size_t Matrix::stored_entries() const {
  if (const auto* d = std::get_if<DenseStorage>(&storage_)) return d->values.size();
  return std::get<CsrStorage>(storage_).values.size();
}

double Matrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw DimensionError("matrix index out of range");
  if (const auto* d = std::get_if<DenseStorage>(&storage_)) return d->values[i * n_ + j];
  const auto& s = std::get<CsrStorage>(storage_);
  const auto first = s.col_indices.begin() + static_cast<std::ptrdiff_t>(s.row_offsets[i]);
  const auto last = s.col_indices.begin() + static_cast<std::ptrdiff_t>(s.row_offsets[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return s.values[static_cast<std::size_t>(it - s.col_indices.begin())];
}

std::vector<double> Matrix::to_dense() const {
  if (const auto* d = std::get_if<DenseStorage>(&storage_)) return d->values;
  std::vector<double> out(n_ * n_, 0.0);
  for_each_entry([&](std::size_t i, std::size_t j, double v) { out[i * n_ + j] = v; });
  return out;
}

Matrix Matrix::to_csr() const {
  if (storage() == Storage::Csr) return *this;
  std::vector<Triplet> entries;
  for_each_entry([&](std::size_t i, std::size_t j, double v) {
    if (v != 0.0) entries.push_back({i, j, v});
  });
  return from_triplets(n_, entries);
}

Matrix Matrix::to_dense_matrix() const { return dense(n_, to_dense()); }

Matrix Matrix::scaled(double c) const {
  Matrix out = *this;
  std::visit([c](auto& s) { for (double& v : s.values) v *= c; }, out.storage_);
  return out;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for_each_entry([&](std::size_t, std::size_t, double v) { m = std::max(m, std::abs(v)); });
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for_each_entry([&](std::size_t, std::size_t, double v) { s += v * v; });
  return std::sqrt(s);
}

void Matrix::multiply(std::span<const double> x, std::span<double> y) const {
  require_same_length(x.size(), n_, "matvec input");
  require_same_length(y.size(), n_, "matvec output");
  if (const auto* d = std::get_if<DenseStorage>(&storage_)) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double* row = d->values.data() + i * n_;
      double sum = 0.0;
      for (std::size_t j = 0; j < n_; ++j) sum += row[j] * x[j];
      y[i] = sum;
    }
    return;
  }
  const auto& s = std::get<CsrStorage>(storage_);
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (std::size_t p = s.row_offsets[i]; p < s.row_offsets[i + 1]; ++p)
      sum += s.values[p] * x[s.col_indices[p]];
    y[i] = sum;
  }
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  Vector y(a.order());
  a.multiply(x, y);
  return y;
}

// ---------------------------------------------------------------------------
// SPD validation

double symmetry_tolerance(const Matrix& a) { return 1e-12 * a.max_abs(); }

void check_symmetric(const Matrix& a) {
  const double tol = symmetry_tolerance(a);
  auto fail = [](std::size_t i, std::size_t j, double diff) {
    throw SymmetryError("matrix is not symmetric: |A(" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ") - A(" + std::to_string(j + 1) + "," +
                        std::to_string(i + 1) + ")| = " + std::to_string(diff));
  };
  a.for_each_entry([&](std::size_t i, std::size_t j, double v) {
    if (j <= i && a.storage() == Matrix::Storage::Dense) return;
    const double diff = std::abs(v - a.at(j, i));
    if (diff > tol) fail(i, j, diff);
  });
}

SpdCertificate spd_validate(const Matrix& a, const SpdValidationOptions& options) {
  check_symmetric(a);
  const std::size_t n = a.order();
  if (a.storage() == Matrix::Storage::Dense || n <= options.densify_limit) {
    const auto factor = CholeskyFactor::factor(a);
    return SpdCertificate{SpdMethod::Cholesky, false, factor.min_pivot()};
  }

  std::mt19937_64 rng(options.probe_seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  Vector av(n);
  double min_quotient = std::numeric_limits<double>::infinity();
  const std::size_t probes = std::max<std::size_t>(options.probe_count, 20);
  for (std::size_t k = 0; k < probes; ++k) {
    for (double& e : v) e = normal(rng);
    a.multiply(v, av);
    const double q = dot(v, av) / dot(v, v);
    if (!(q > 0.0))
      throw NotPositiveDefiniteError("random probe " + std::to_string(k) + " found vᵀAv ≤ 0", k,
                                     q);
    min_quotient = std::min(min_quotient, q);
  }
  return SpdCertificate{SpdMethod::RandomProbes, true, min_quotient};
}

SpdMatrix SpdMatrix::validate(const Matrix& a, const SpdValidationOptions& options) {
  check_symmetric(a);
  const std::size_t n = a.order();
  Matrix sym = a;
  if (a.storage() == Matrix::Storage::Dense) {
    std::vector<double> vals = a.to_dense();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double m = 0.5 * vals[i * n + j] + 0.5 * vals[j * n + i];
        vals[i * n + j] = m;
        vals[j * n + i] = m;
      }
    sym = Matrix::dense(n, std::move(vals));
  } else {
    std::vector<Triplet> halves;
    halves.reserve(2 * a.stored_entries());
    a.for_each_entry([&](std::size_t i, std::size_t j, double v) {
      halves.push_back({i, j, 0.5 * v});
      halves.push_back({j, i, 0.5 * v});
    });
    sym = Matrix::from_triplets(n, halves);
  }
  const SpdCertificate cert = spd_validate(sym, options);
  return SpdMatrix(std::move(sym), cert);
}

SpdMatrix SpdMatrix::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("SPD scaling factor must be positive");
  return SpdMatrix(matrix_.scaled(c), certificate_);
}

Vector matvec(const SpdMatrix& a, std::span<const double> x) { return matvec(a.matrix(), x); }

// ---------------------------------------------------------------------------
// Cholesky

CholeskyFactor CholeskyFactor::factor(const Matrix& a) {
  const std::size_t n = a.order();
  std::vector<double> l = a.to_dense();
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = l[j * n + j];
    for (std::size_t k = 0; k < j; ++k) pivot -= l[j * n + k] * l[j * n + k];
    if (!(pivot > 0.0) || !std::isfinite(pivot))
      throw NotPositiveDefiniteError(
          "matrix is not positive definite: pivot " + std::to_string(j + 1) + " is " +
              std::to_string(pivot),
          j, pivot);
    min_pivot = std::min(min_pivot, pivot);
    const double ljj = std::sqrt(pivot);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = l[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) l[i * n + j] = 0.0;
  return CholeskyFactor(n, std::move(l), min_pivot);
}

Vector CholeskyFactor::solve(std::span<const double> rhs) const {
  require_same_length(rhs.size(), n_, "Cholesky solve");
  Vector y(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n_; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower_[i * n_ + k] * y[k];
    y[i] = s / lower_[i * n_ + i];
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n_; ++k) s -= lower_[k * n_ + ii] * y[k];
    y[ii] = s / lower_[ii * n_ + ii];
  }
  return y;
}

// ---------------------------------------------------------------------------
// Spectrum-controlled generation

SpectrumSpec SpectrumSpec::explicit_values(std::vector<double> eigenvalues) {
  for (double v : eigenvalues)
    if (!(v > 0.0) || !std::isfinite(v))
      throw SpecError("eigenvalues must be finite and strictly positive");
  return SpectrumSpec(std::move(eigenvalues));
}

SpectrumSpec SpectrumSpec::range(double lambda_min, double lambda_max,
                                 SpectrumDistribution distribution) {
  if (!(lambda_min > 0.0) || !std::isfinite(lambda_max))
    throw SpecError("lambda_min must be strictly positive and lambda_max finite");
  if (lambda_min > lambda_max) throw SpecError("lambda_min exceeds lambda_max");
  return SpectrumSpec(Range{lambda_min, lambda_max, distribution});
}

std::vector<double> SpectrumSpec::eigenvalues(std::size_t n) const {
  if (n == 0) throw SpecError("spectrum size must be positive");
  if (const auto* list = std::get_if<std::vector<double>>(&spec_)) {
    if (list->size() != n)
      throw SpecError("expected " + std::to_string(n) + " eigenvalues, got " +
                      std::to_string(list->size()));
    return *list;
  }
  const auto& r = std::get<Range>(spec_);
  std::vector<double> out(n, r.lambda_min);
  if (n == 1) return out;
  const double last = static_cast<double>(n - 1);
  switch (r.distribution) {
    case SpectrumDistribution::LogUniform: {
      const double ratio = r.lambda_max / r.lambda_min;
      for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = r.lambda_min * std::pow(ratio, static_cast<double>(i) / last);
      out[n - 1] = r.lambda_max;
      break;
    }
    case SpectrumDistribution::Linear:
      for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = r.lambda_min + (r.lambda_max - r.lambda_min) * static_cast<double>(i) / last;
      out[n - 1] = r.lambda_max;
      break;
    case SpectrumDistribution::Clustered: {
      // Three groups with 1% relative width; the top group fills before the middle one.
      constexpr double kWidth = 1e-2;
      const double mid = std::sqrt(r.lambda_min * r.lambda_max);
      const std::size_t low_count = (n + 2) / 3;
      const std::size_t high_count = (n + 1) / 3;
      const std::size_t mid_count = n - low_count - high_count;
      auto spread = [](std::size_t i, std::size_t count) {
        return count <= 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      };
      std::size_t p = 0;
      for (std::size_t i = 0; i < low_count; ++i)
        out[p++] = std::min(r.lambda_max, r.lambda_min * (1.0 + kWidth * spread(i, low_count)));
      for (std::size_t i = 0; i < mid_count; ++i)
        out[p++] = std::clamp(mid * (1.0 + kWidth * (spread(i, mid_count) - 0.5)), r.lambda_min,
                              r.lambda_max);
      for (std::size_t i = 0; i < high_count; ++i)
        out[p++] =
            std::max(r.lambda_min, r.lambda_max * (1.0 - kWidth * spread(i, high_count)));
      std::sort(out.begin(), out.end());
      break;
    }
  }
  return out;
}

std::vector<double> random_orthogonal(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("orthogonal matrix order must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  // Column-major while orthonormalizing.
  std::vector<Vector> cols(n, Vector(n));
  for (auto& c : cols)
    for (double& e : c) e = normal(rng);

  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) axpy(-dot(cols[k], cols[j]), cols[k], cols[j]);
    const double len = norm(cols[j]);
    if (!(len > 0.0)) throw Error("random_orthogonal: rank-deficient Gaussian draw");
    for (double& e : cols[j]) e /= len;
  }

  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i * n + j] = cols[j][i];
  return q;
}

SpdMatrix generate_spd(std::size_t n, const SpectrumSpec& spec, std::uint64_t seed) {
  const std::vector<double> lambda = spec.eigenvalues(n);
  const std::vector<double> q = random_orthogonal(n, seed);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += q[i * n + k] * lambda[k] * q[j * n + k];
      a[i * n + j] = s;
      a[j * n + i] = s;
    }
  return SpdMatrix::validate(Matrix::dense(n, std::move(a)));
}

}  // namespace lincg
