#ifndef LINCG_MATRIX_MARKET_HPP
#define LINCG_MATRIX_MARKET_HPP

#include <iosfwd>

#include "lincg/linalg.hpp"

namespace lincg {

/// Reads a real (or integer) MatrixMarket file in coordinate or array layout.
///
/// Coordinate files become CSR, array files dense. Indices are 1-based on disk.
/// Symmetric files store the lower triangle and are mirrored on read; general
/// files must already be symmetric. Throws ParseError (with the line number),
/// DimensionError for non-square sizes, SymmetryError, or NotPositiveDefiniteError.
SpdMatrix read_matrix_market(std::istream& in);

/// Same parse without the SPD validation step.
Matrix read_matrix_market_unchecked(std::istream& in);

/// CSR matrices are written as "coordinate real symmetric" (lower triangle),
/// dense ones as "array real general" (column-major). 17 significant digits.
void write_matrix_market(std::ostream& out, const Matrix& a);

}  // namespace lincg

#endif  // LINCG_MATRIX_MARKET_HPP
