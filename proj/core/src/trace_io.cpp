#include "lincg/trace_io.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "lincg/errors.hpp"
#include "lincg/format.hpp"

namespace lincg {

using json = nlohmann::ordered_json;

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::Structured ? "structured" : "tabular";
}

TraceDocument make_trace_document(const QuadraticProblem& problem, const IterationTrace& trace,
                                  const TraceDocumentOptions& options) {
  TraceDocument doc;
  auto& m = doc.metadata;
  m.problem = options.description;
  m.dimension = problem.dimension();
  m.stepsize = to_string(trace.config.stepsize);
  m.beta = to_string(trace.config.beta);
  m.gradient_update = to_string(trace.config.gradient_update);
  m.relative_tolerance = trace.config.relative_tolerance;
  m.absolute_tolerance = trace.config.absolute_tolerance;
  m.max_iterations = trace.config.iteration_cap(problem.dimension());
  m.gradient_tolerance = trace.gradient_tolerance;
  m.initial_gradient_norm = trace.initial_gradient_norm;
  m.terminated_at = trace.terminated_at;
  m.termination_reason = to_string(trace.reason);
  m.breakdown_detail = trace.breakdown_detail;
  m.final_gradient_norm = norm(trace.final_g);
  m.final_objective = problem.objective(trace.final_x);
  m.timestamp = options.timestamp;

  doc.rows.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    TraceRow row;
    row.k = r.k;
    row.alpha = r.alpha;
    row.beta = r.beta;
    row.gradient_norm = norm(r.g);
    row.objective = problem.objective(r.x);
    row.alpha_alternate = r.alpha_alternate;
    if (options.include_vectors) {
      row.x = r.x;
      row.g = r.g;
      row.d = r.d;
    }
    doc.rows.push_back(std::move(row));
  }
  if (options.include_vectors) doc.final_x = trace.final_x;
  return doc;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

constexpr std::string_view kTolerancePolicy =
    "tolerances are an engineering choice: the identities hold exactly only in exact "
    "arithmetic, and the residuals measure floating-point agreement";

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

/// Infinite condition estimates are stored as the string "inf".
json condition_json(const std::optional<double>& kappa) {
  if (!kappa) return nullptr;
  if (!std::isfinite(*kappa)) return "inf";
  return *kappa;
}

std::optional<double> condition_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

json report_to_json(const VerificationReport& report, ReportDetail detail) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    json residuals = json::array();
    std::size_t failures = 0;
    for (const auto& r : c.residuals) {
      if (!r.pass) ++failures;
      if (detail == ReportDetail::FailuresOnly && r.pass) continue;
      json e = {{"i", r.i},
                {"j", r.j ? json(*r.j) : json(nullptr)},
                {"raw", r.raw},
                {"normalized", r.normalized},
                {"pass", r.pass}};
      if (!r.note.empty()) e["note"] = r.note;
      residuals.push_back(std::move(e));
    }
    checks.push_back({{"identity", to_string(c.id)},
                      {"tolerance", c.tolerance},
                      {"worst_violation", c.worst_violation},
                      {"passed", c.passed},
                      {"residual_count", c.residuals.size()},
                      {"failure_count", failures},
                      {"residuals", std::move(residuals)}});
  }
  return {{"passed", report.passed()},
          {"tolerance_regime", to_string(report.regime)},
          {"tolerance", report.tolerance},
          {"condition_estimate", condition_json(report.condition_estimate)},
          {"exact_arithmetic_compliance", false},
          {"tolerance_policy", kTolerancePolicy},
          {"terminal_gradient_excluded", report.terminal_gradient_excluded},
          {"checks", std::move(checks)}};
}

ToleranceRegime regime_from_string(const std::string& s) {
  for (auto r : {ToleranceRegime::Standard, ToleranceRegime::Relaxed, ToleranceRegime::Custom})
    if (to_string(r) == s) return r;
  throw InvalidArgument("unknown tolerance regime '" + s + "'");
}

VerificationReport report_from_json(const json& j) {
  VerificationReport report;
  report.regime = regime_from_string(j.at("tolerance_regime").get<std::string>());
  report.tolerance = j.at("tolerance").get<double>();
  report.condition_estimate = condition_from_json(j.at("condition_estimate"));
  report.terminal_gradient_excluded = j.at("terminal_gradient_excluded").get<bool>();
  for (const auto& c : j.at("checks")) {
    CheckResult check;
    check.id = identity_from_string(c.at("identity").get<std::string>());
    check.tolerance = c.at("tolerance").get<double>();
    check.worst_violation = c.at("worst_violation").get<double>();
    check.passed = c.at("passed").get<bool>();
    for (const auto& r : c.at("residuals")) {
      IdentityResidual res;
      res.id = check.id;
      res.i = r.at("i").get<std::size_t>();
      if (!r.at("j").is_null()) res.j = r.at("j").get<std::size_t>();
      res.raw = r.at("raw").get<double>();
      res.normalized = r.at("normalized").get<double>();
      res.pass = r.at("pass").get<bool>();
      if (r.contains("note")) res.note = r.at("note").get<std::string>();
      check.residuals.push_back(std::move(res));
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

json trace_to_json(const TraceDocument& doc, ReportDetail detail) {
  const auto& m = doc.metadata;
  json meta = {{"problem", m.problem},
               {"dimension", m.dimension},
               {"config",
                {{"stepsize", m.stepsize},
                 {"beta", m.beta},
                 {"gradient_update", m.gradient_update},
                 {"relative_tolerance", m.relative_tolerance},
                 {"absolute_tolerance", optional_number(m.absolute_tolerance)},
                 {"max_iterations", m.max_iterations}}},
               {"gradient_tolerance", m.gradient_tolerance},
               {"initial_gradient_norm", m.initial_gradient_norm},
               {"terminated_at", m.terminated_at},
               {"termination_reason", m.termination_reason},
               {"final_gradient_norm", m.final_gradient_norm},
               {"final_objective", m.final_objective}};
  if (!m.breakdown_detail.empty()) meta["breakdown_detail"] = m.breakdown_detail;
  if (!m.timestamp.empty()) meta["timestamp"] = m.timestamp;

  json rows = json::array();
  for (const auto& r : doc.rows) {
    json row = {{"k", r.k},
                {"alpha", r.alpha},
                {"beta", optional_number(r.beta)},
                {"grad_norm", r.gradient_norm},
                {"objective", r.objective}};
    if (r.alpha_alternate) row["alpha_alternate"] = *r.alpha_alternate;
    if (!r.x.empty()) {
      row["x"] = r.x;
      row["g"] = r.g;
      row["d"] = r.d;
    }
    rows.push_back(std::move(row));
  }

  json out = {{"format", m.version}, {"metadata", std::move(meta)}, {"iterations", std::move(rows)}};
  if (!doc.final_x.empty()) out["final_x"] = doc.final_x;
  if (doc.verification) out["verification"] = report_to_json(*doc.verification, detail);
  return out;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0);
  }
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_scalar(*v) : std::string();
}

constexpr std::string_view kTraceHeader = "k,alpha,beta,grad_norm,objective,alpha_alternate";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::string write_trace(const TraceDocument& doc, OutputFormat format, ReportDetail detail) {
  if (format == OutputFormat::Structured) return trace_to_json(doc, detail).dump(2) + "\n";

  const auto& m = doc.metadata;
  std::ostringstream out;
  out << "# format=" << m.version << '\n'
      << "# problem=" << m.problem << '\n'
      << "# dimension=" << m.dimension << '\n'
      << "# stepsize=" << m.stepsize << " beta=" << m.beta
      << " gradient_update=" << m.gradient_update << '\n'
      << "# gradient_tolerance=" << format_scalar(m.gradient_tolerance) << '\n'
      << "# initial_gradient_norm=" << format_scalar(m.initial_gradient_norm) << '\n'
      << "# terminated_at=" << m.terminated_at << " reason=" << m.termination_reason << '\n'
      << "# final_gradient_norm=" << format_scalar(m.final_gradient_norm) << '\n'
      << "# final_objective=" << format_scalar(m.final_objective) << '\n';
  if (!m.timestamp.empty()) out << "# timestamp=" << m.timestamp << '\n';
  if (doc.verification)
    out << "# verification=" << (doc.verification->passed() ? "pass" : "fail") << '\n';
  out << kTraceHeader << '\n';
  for (const auto& r : doc.rows)
    out << r.k << ',' << format_scalar(r.alpha) << ',' << optional_field(r.beta) << ','
        << format_scalar(r.gradient_norm) << ',' << format_scalar(r.objective) << ','
        << optional_field(r.alpha_alternate) << '\n';
  return out.str();
}

std::string write_report(const VerificationReport& report, OutputFormat format,
                         ReportDetail detail) {
  if (format == OutputFormat::Structured) return report_to_json(report, detail).dump(2) + "\n";

  std::ostringstream out;
  out << "# passed=" << (report.passed() ? "true" : "false") << '\n'
      << "# tolerance_regime=" << to_string(report.regime) << '\n'
      << "# tolerance=" << format_scalar(report.tolerance) << '\n'
      << "# condition_estimate="
      << (report.condition_estimate ? format_scalar(*report.condition_estimate) : "") << '\n'
      << "# exact_arithmetic_compliance=false\n"
      << "# tolerance_policy=" << kTolerancePolicy << '\n';
  for (const auto& c : report.checks)
    out << "# check " << to_string(c.id) << " worst=" << format_scalar(c.worst_violation)
        << " tolerance=" << format_scalar(c.tolerance) << " passed=" << (c.passed ? "true" : "false")
        << '\n';
  out << "identity,i,j,raw,normalized,tolerance,pass,note\n";
  for (const auto& c : report.checks)
    for (const auto& r : c.residuals) {
      if (detail == ReportDetail::FailuresOnly && r.pass) continue;
      out << to_string(c.id) << ',' << r.i << ',' << (r.j ? std::to_string(*r.j) : "") << ','
          << format_scalar(r.raw) << ',' << format_scalar(r.normalized) << ','
          << format_scalar(c.tolerance) << ',' << (r.pass ? "true" : "false") << ','
          << csv_field(r.note) << '\n';
    }
  return out.str();
}

TraceDocument parse_structured_trace(std::string_view text) {
  const json j = parse_json(text);
  try {
    TraceDocument doc;
    auto& m = doc.metadata;
    m.version = j.at("format").get<std::string>();
    if (m.version != kTraceFormatVersion)
      throw ParseError("unsupported trace format '" + m.version + "'", 0);
    const auto& meta = j.at("metadata");
    m.problem = meta.at("problem").get<std::string>();
    m.dimension = meta.at("dimension").get<std::size_t>();
    const auto& cfg = meta.at("config");
    m.stepsize = cfg.at("stepsize").get<std::string>();
    m.beta = cfg.at("beta").get<std::string>();
    m.gradient_update = cfg.at("gradient_update").get<std::string>();
    m.relative_tolerance = cfg.at("relative_tolerance").get<double>();
    m.absolute_tolerance = read_optional(cfg, "absolute_tolerance");
    m.max_iterations = cfg.at("max_iterations").get<std::size_t>();
    m.gradient_tolerance = meta.at("gradient_tolerance").get<double>();
    m.initial_gradient_norm = meta.at("initial_gradient_norm").get<double>();
    m.terminated_at = meta.at("terminated_at").get<std::size_t>();
    m.termination_reason = meta.at("termination_reason").get<std::string>();
    m.final_gradient_norm = meta.at("final_gradient_norm").get<double>();
    m.final_objective = meta.at("final_objective").get<double>();
    if (meta.contains("breakdown_detail"))
      m.breakdown_detail = meta.at("breakdown_detail").get<std::string>();
    if (meta.contains("timestamp")) m.timestamp = meta.at("timestamp").get<std::string>();

    for (const auto& r : j.at("iterations")) {
      TraceRow row;
      row.k = r.at("k").get<std::size_t>();
      row.alpha = r.at("alpha").get<double>();
      row.beta = read_optional(r, "beta");
      row.gradient_norm = r.at("grad_norm").get<double>();
      row.objective = r.at("objective").get<double>();
      row.alpha_alternate = read_optional(r, "alpha_alternate");
      if (r.contains("x")) {
        row.x = r.at("x").get<Vector>();
        row.g = r.at("g").get<Vector>();
        row.d = r.at("d").get<Vector>();
      }
      doc.rows.push_back(std::move(row));
    }
    if (j.contains("final_x")) doc.final_x = j.at("final_x").get<Vector>();
    if (j.contains("verification")) doc.verification = report_from_json(j.at("verification"));
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed trace document: ") + e.what(), 0);
  }
}

std::vector<TraceRow> parse_tabular_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<TraceRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  auto scalar = [&](const std::string& s) {
    try {
      return parse_scalar(s);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  };
  auto optional = [&](const std::string& s) {
    return s.empty() ? std::optional<double>{} : std::optional<double>{scalar(s)};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kTraceHeader) throw ParseError("unexpected header '" + line + "'", line_no);
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 6) throw ParseError("expected 6 fields", line_no);
    TraceRow row;
    try {
      row.k = static_cast<std::size_t>(std::stoull(f[0]));
    } catch (const std::exception&) {
      throw ParseError("bad iteration index '" + f[0] + "'", line_no);
    }
    row.alpha = scalar(f[1]);
    row.beta = optional(f[2]);
    row.gradient_norm = scalar(f[3]);
    row.objective = scalar(f[4]);
    row.alpha_alternate = optional(f[5]);
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError("missing header row", line_no);
  return rows;
}

VerificationReport parse_structured_report(std::string_view text) {
  const json j = parse_json(text);
  try {
    return report_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
}

}  // namespace lincg
