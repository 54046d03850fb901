#include "lincg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lincg/errors.hpp"
#include "lincg/format.hpp"

namespace lincg {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

/// Reads lines, skipping comments and blanks, and remembers the line number.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '%') continue;
      tokens = split(line);
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }
  void count_line() { ++line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::size_t parse_index(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || end != tok.data() + tok.size())
    throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
  return v;
}

double parse_value(const std::string& tok, std::size_t line) {
  try {
    return parse_scalar(tok);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), line);
  }
}

}  // namespace

Matrix read_matrix_market_unchecked(std::istream& in) {
  LineReader reader(in);

  std::string banner;
  if (!std::getline(in, banner)) throw ParseError("empty input", 1);
  reader.count_line();
  const auto header = split(lower(banner));
  if (header.empty() || header[0] != "%%matrixmarket")
    throw ParseError("missing %%MatrixMarket banner", 1);
  if (header.size() != 5) throw ParseError("banner needs object, format, field and symmetry", 1);
  if (header[1] != "matrix") throw ParseError("unsupported object '" + header[1] + "'", 1);
  const std::string& layout = header[2];
  const std::string& field = header[3];
  const std::string& symmetry = header[4];
  if (layout != "coordinate" && layout != "array")
    throw ParseError("unsupported format '" + layout + "'", 1);
  if (field != "real" && field != "integer")
    throw ParseError("unsupported field '" + field + "'", 1);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported symmetry '" + symmetry + "'", 1);
  const bool symmetric = symmetry == "symmetric";

  std::vector<std::string> tok;
  if (!reader.next(tok)) throw ParseError("missing size line", reader.line() + 1);
  const std::size_t size_line = reader.line();
  const bool coordinate = layout == "coordinate";
  if (tok.size() != (coordinate ? 3u : 2u))
    throw ParseError(coordinate ? "size line needs rows, columns and entry count"
                                : "size line needs rows and columns",
                     size_line);
  const std::size_t rows = parse_index(tok[0], size_line);
  const std::size_t cols = parse_index(tok[1], size_line);
  if (rows != cols)
    throw DimensionError("matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                         ", expected square");
  if (rows == 0) throw ParseError("matrix order must be positive", size_line);
  const std::size_t n = rows;

  if (coordinate) {
    const std::size_t nnz = parse_index(tok[2], size_line);
    std::vector<Triplet> entries;
    entries.reserve(symmetric ? 2 * nnz : nnz);
    for (std::size_t e = 0; e < nnz; ++e) {
      if (!reader.next(tok))
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                             std::to_string(e),
                         reader.line());
      const std::size_t line = reader.line();
      if (tok.size() != 3) throw ParseError("entry needs row, column and value", line);
      const std::size_t i = parse_index(tok[0], line);
      const std::size_t j = parse_index(tok[1], line);
      if (i < 1 || i > n || j < 1 || j > n) throw ParseError("entry index out of range", line);
      const double v = parse_value(tok[2], line);
      if (symmetric && j > i)
        throw ParseError("symmetric file stores an upper-triangle entry", line);
      entries.push_back({i - 1, j - 1, v});
      if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    }
    if (reader.next(tok)) throw ParseError("unexpected data after the last entry", reader.line());
    return Matrix::from_triplets(n, entries);
  }

  // Array layout, column-major; symmetric files hold the lower triangle only.
  std::vector<double> dense(n * n, 0.0);
  std::vector<double> values;
  const std::size_t expected = symmetric ? n * (n + 1) / 2 : n * n;
  values.reserve(expected);
  while (values.size() < expected && reader.next(tok))
    for (const auto& t : tok) {
      if (values.size() == expected)
        throw ParseError("unexpected data after the last entry", reader.line());
      values.push_back(parse_value(t, reader.line()));
    }
  if (values.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " values, found " +
                         std::to_string(values.size()),
                     reader.line());
  if (reader.next(tok)) throw ParseError("unexpected data after the last entry", reader.line());
  std::size_t p = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = symmetric ? j : 0; i < n; ++i) {
      dense[i * n + j] = values[p];
      if (symmetric) dense[j * n + i] = values[p];
      ++p;
    }
  return Matrix::dense(n, std::move(dense));
}

SpdMatrix read_matrix_market(std::istream& in) {
  return SpdMatrix::validate(read_matrix_market_unchecked(in));
}

void write_matrix_market(std::ostream& out, const Matrix& a) {
  const std::size_t n = a.order();
  if (a.storage() == Matrix::Storage::Dense) {
    out << "%%MatrixMarket matrix array real general\n" << n << ' ' << n << '\n';
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) out << format_scalar(a.at(i, j)) << '\n';
    return;
  }
  std::vector<Triplet> lower_entries;
  a.for_each_entry([&](std::size_t i, std::size_t j, double v) {
    if (j <= i) lower_entries.push_back({i, j, v});
  });
  out << "%%MatrixMarket matrix coordinate real symmetric\n"
      << n << ' ' << n << ' ' << lower_entries.size() << '\n';
  for (const auto& t : lower_entries)
    out << t.row + 1 << ' ' << t.col + 1 << ' ' << format_scalar(t.value) << '\n';
}

}  // namespace lincg
