#ifndef LINCG_TRACE_IO_HPP
#define LINCG_TRACE_IO_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lincg/cg.hpp"
#include "lincg/verify.hpp"

namespace lincg {

inline constexpr std::string_view kTraceFormatVersion = "lincg-trace/1";

enum class OutputFormat {
  Structured,  ///< one JSON document
  Tabular,     ///< CSV, one row per iteration, '#' metadata lines before the header
};

std::string_view to_string(OutputFormat format);

struct TraceMetadata {
  std::string version{kTraceFormatVersion};
  std::string problem;
  std::size_t dimension = 0;
  std::string stepsize;
  std::string beta;
  std::string gradient_update;
  double relative_tolerance = 0.0;
  std::optional<double> absolute_tolerance;
  std::size_t max_iterations = 0;
  double gradient_tolerance = 0.0;
  double initial_gradient_norm = 0.0;
  std::size_t terminated_at = 0;
  std::string termination_reason;
  std::string breakdown_detail;
  double final_gradient_norm = 0.0;
  double final_objective = 0.0;
  /// Omitted from the output when empty, which keeps repeated runs byte-identical.
  std::string timestamp;
};

struct TraceRow {
  std::size_t k = 0;
  double alpha = 0.0;
  std::optional<double> beta;
  double gradient_norm = 0.0;
  double objective = 0.0;
  std::optional<double> alpha_alternate;
  /// Filled only when vectors are included.
  Vector x;
  Vector g;
  Vector d;
};

struct TraceDocument {
  TraceMetadata metadata;
  std::vector<TraceRow> rows;
  /// Filled only when vectors are included.
  Vector final_x;
  std::optional<VerificationReport> verification;
};

struct TraceDocumentOptions {
  std::string description;
  bool include_vectors = false;
  std::string timestamp;
};

TraceDocument make_trace_document(const QuadraticProblem& problem, const IterationTrace& trace,
                                  const TraceDocumentOptions& options = {});

enum class ReportDetail {
  FailuresOnly,  ///< per-check summaries plus failing residuals
  Full,          ///< every residual
};

std::string write_trace(const TraceDocument& doc, OutputFormat format,
                        ReportDetail detail = ReportDetail::FailuresOnly);
std::string write_report(const VerificationReport& report, OutputFormat format,
                         ReportDetail detail = ReportDetail::FailuresOnly);

/// Inverses of the writers. Throw ParseError.
TraceDocument parse_structured_trace(std::string_view text);
std::vector<TraceRow> parse_tabular_trace(std::string_view text);
VerificationReport parse_structured_report(std::string_view text);

}  // namespace lincg

#endif  // LINCG_TRACE_IO_HPP
