#ifndef LINCG_ERRORS_HPP
#define LINCG_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lincg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be symmetric is not, beyond the symmetry tolerance.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// A symmetric factorization hit a non-positive pivot (or a probe found vᵀAv ≤ 0).
class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& what, std::size_t pivot_index, double pivot)
      : Error(what), pivot_index_(pivot_index), pivot_(pivot) {}

  std::size_t pivot_index() const { return pivot_index_; }
  double pivot() const { return pivot_; }

 private:
  std::size_t pivot_index_;
  double pivot_;
};

/// Non-finite entries, violated preconditions and similar caller mistakes.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An invalid spectrum or builtin-problem description.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A near-zero denominator in a stepsize or beta formula.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, std::string formula, std::size_t iteration,
                 double denominator)
      : Error(what), formula_(std::move(formula)), iteration_(iteration),
        denominator_(denominator) {}

  const std::string& formula() const { return formula_; }
  std::size_t iteration() const { return iteration_; }
  double denominator() const { return denominator_; }

 private:
  std::string formula_;
  std::size_t iteration_;
  double denominator_;
};

/// Malformed input text. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A trace lacks the data a verification check needs.
class IncompleteTraceError : public Error {
 public:
  using Error::Error;
};

}  // namespace lincg

#endif  // LINCG_ERRORS_HPP
