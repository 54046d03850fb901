#ifndef LINCG_PROBLEMS_HPP
#define LINCG_PROBLEMS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lincg/cg.hpp"
#include "lincg/linalg.hpp"

namespace lincg {

enum class ProblemFamily {
  Laplacian1D,  ///< tridiag(−1, 2, −1), CSR
  Hilbert,      ///< H_ij = 1/(i+j−1), dense, n ≤ 12
  Diagonal,     ///< given eigenvalues, CSR
  RandomSpd,    ///< generate_spd, dense
};

std::string_view to_string(ProblemFamily family);
/// Throws SpecError for unknown names.
ProblemFamily family_from_string(std::string_view name);

inline constexpr std::size_t kMaxHilbertOrder = 12;

struct RhsOnes {};
struct RhsRandom {
  std::uint64_t seed = 0;
};
/// b = −A·x*, so the minimizer is x*.
struct RhsKnownSolution {
  Vector solution;
};
using RhsMode = std::variant<RhsOnes, RhsRandom, RhsKnownSolution>;

struct BuiltinProblemSpec {
  ProblemFamily family = ProblemFamily::Laplacian1D;
  std::size_t n = 0;
  /// Diagonal family only.
  std::vector<double> eigenvalues;
  /// RandomSpd family only.
  std::optional<SpectrumSpec> spectrum;
  std::uint64_t seed = 0;
  RhsMode rhs = RhsOnes{};

  /// Throws SpecError.
  void validate() const;
  /// Short human-readable label for trace metadata.
  std::string describe() const;
};

QuadraticProblem builtin_problem(const BuiltinProblemSpec& spec);

/// Standard normal entries from mt19937_64(seed); the b used by RhsRandom.
Vector random_vector(std::size_t n, std::uint64_t seed);

/// Sidecar vector format: one decimal per line, 17 significant digits.
void write_vector(std::ostream& out, std::span<const double> v);
/// Blank lines and lines starting with '%' or '#' are skipped. Throws ParseError.
Vector read_vector(std::istream& in);

}  // namespace lincg

#endif  // LINCG_PROBLEMS_HPP
