#include "lincg/problems.hpp"

#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "lincg/errors.hpp"
#include "lincg/format.hpp"

namespace lincg {

std::string_view to_string(ProblemFamily family) {
  switch (family) {
    case ProblemFamily::Laplacian1D: return "laplacian1d";
    case ProblemFamily::Hilbert: return "hilbert";
    case ProblemFamily::Diagonal: return "diagonal";
    case ProblemFamily::RandomSpd: return "random_spd";
  }
  return "?";
}

ProblemFamily family_from_string(std::string_view name) {
  for (auto f : {ProblemFamily::Laplacian1D, ProblemFamily::Hilbert, ProblemFamily::Diagonal,
                 ProblemFamily::RandomSpd})
    if (to_string(f) == name) return f;
  throw SpecError("unknown problem family '" + std::string(name) + "'");
}

void BuiltinProblemSpec::validate() const {
  if (n == 0) throw SpecError("problem size n must be at least 1");
  switch (family) {
    case ProblemFamily::Hilbert:
      if (n > kMaxHilbertOrder)
        throw SpecError("hilbert problems are limited to n <= " +
                        std::to_string(kMaxHilbertOrder));
      break;
    case ProblemFamily::Diagonal:
      if (eigenvalues.size() != n)
        throw SpecError("diagonal problem needs exactly n = " + std::to_string(n) +
                        " eigenvalues, got " + std::to_string(eigenvalues.size()));
      SpectrumSpec::explicit_values(eigenvalues);
      break;
    case ProblemFamily::RandomSpd:
      if (!spectrum) throw SpecError("random_spd problem needs a spectrum");
      spectrum->eigenvalues(n);
      break;
    case ProblemFamily::Laplacian1D:
      break;
  }
  if (const auto* known = std::get_if<RhsKnownSolution>(&rhs); known && known->solution.size() != n)
    throw SpecError("known solution has length " + std::to_string(known->solution.size()) +
                    ", expected " + std::to_string(n));
}

std::string BuiltinProblemSpec::describe() const {
  std::ostringstream out;
  out << to_string(family) << " n=" << n;
  if (family == ProblemFamily::RandomSpd) {
    const auto eigs = spectrum->eigenvalues(n);
    out << " lambda=[" << format_scalar(eigs.front()) << "," << format_scalar(eigs.back())
        << "] seed=" << seed;
  }
  if (family == ProblemFamily::Diagonal) {
    out << " eigs=";
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
      out << (i ? "," : "") << format_scalar(eigenvalues[i]);
  }
  if (std::holds_alternative<RhsOnes>(rhs)) out << " b=ones";
  if (const auto* r = std::get_if<RhsRandom>(&rhs)) out << " b=random(" << r->seed << ")";
  if (std::holds_alternative<RhsKnownSolution>(rhs)) out << " b=-A*x_known";
  return out.str();
}

namespace {

Matrix laplacian1d(std::size_t n) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i + 1 < n) {
      t.push_back({i, i + 1, -1.0});
      t.push_back({i + 1, i, -1.0});
    }
  }
  return Matrix::from_triplets(n, t);
}

Matrix hilbert(std::size_t n) {
  std::vector<double> h(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h[i * n + j] = 1.0 / static_cast<double>(i + j + 1);
  return Matrix::dense(n, std::move(h));
}

}  // namespace

QuadraticProblem builtin_problem(const BuiltinProblemSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const SpdMatrix a = [&] {
    switch (spec.family) {
      case ProblemFamily::Laplacian1D: return SpdMatrix::validate(laplacian1d(n));
      case ProblemFamily::Hilbert: return SpdMatrix::validate(hilbert(n));
      case ProblemFamily::Diagonal: return SpdMatrix::validate(Matrix::diagonal(spec.eigenvalues));
      case ProblemFamily::RandomSpd: return generate_spd(n, *spec.spectrum, spec.seed);
    }
    throw SpecError("unknown problem family");
  }();

  Vector b(n, 1.0);
  if (const auto* r = std::get_if<RhsRandom>(&spec.rhs)) {
    b = random_vector(n, r->seed);
  } else if (const auto* known = std::get_if<RhsKnownSolution>(&spec.rhs)) {
    b = matvec(a, known->solution);
    for (double& v : b) v = -v;
  }
  return QuadraticProblem(a, std::move(b));
}

Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (double& e : v) e = normal(rng);
  return v;
}

void write_vector(std::ostream& out, std::span<const double> v) {
  for (double e : v) out << format_scalar(e) << '\n';
}

Vector read_vector(std::istream& in) {
  Vector v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%' || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    try {
      v.push_back(parse_scalar(std::string_view(line).substr(first, last - first + 1)));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (v.empty()) throw ParseError("vector file holds no values", 0);
  return v;
}

}  // namespace lincg
