#include "lincg_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lincg/cg.hpp"
#include "lincg/errors.hpp"
#include "lincg/matrix_market.hpp"
#include "lincg/problems.hpp"
#include "lincg/trace_io.hpp"
#include "lincg/verify.hpp"

namespace lincg::cli {
namespace {

constexpr double kCompareTolerance = 1e-12;

// Shortest round-trip form for human-facing summaries.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct ProblemOptions {
  std::string builtin;
  std::optional<std::size_t> n;
  std::vector<double> eigs;
  std::optional<double> cond;
  double lambda_min = 1.0;
  std::string spectrum = "log";
  std::uint64_t seed = 0;
  std::string b_mode;
  std::uint64_t b_seed = 0;
  std::vector<double> known_solution;
  std::string matrix_file;
  std::string rhs_file;
};

struct RunOptions {
  std::string stepsize = "exact";
  std::string beta = "fr";
  std::string grad_update = "recurrence";
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::string format = "structured";
  bool no_timestamp = false;
  bool include_vectors = false;
  bool full_report = false;
  std::string output;
  std::optional<double> check_tol;
  double compare_tol = kCompareTolerance;
  std::string prefix;
};

void add_problem_options(CLI::App& cmd, ProblemOptions& p) {
  cmd.add_option("--builtin", p.builtin, "Builtin family: laplacian1d, hilbert, diagonal, random_spd")
      ->check(CLI::IsMember({"laplacian1d", "hilbert", "diagonal", "random_spd"}));
  cmd.add_option("--n", p.n, "Problem size")->check(CLI::PositiveNumber);
  cmd.add_option("--eigs", p.eigs, "Eigenvalues for the diagonal family")->delimiter(',');
  cmd.add_option("--cond", p.cond, "Condition number for random_spd (lambda_max / lambda_min)")
      ->check(CLI::Range(1.0, 1e300));
  cmd.add_option("--lambda-min", p.lambda_min, "Smallest eigenvalue for random_spd")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--spectrum", p.spectrum, "Eigenvalue placement for random_spd")
      ->check(CLI::IsMember({"log", "linear", "clustered"}));
  cmd.add_option("--seed", p.seed, "Seed for random_spd");
  cmd.add_option("--b", p.b_mode, "Right-hand side: ones or random")
      ->check(CLI::IsMember({"ones", "random"}));
  cmd.add_option("--b-seed", p.b_seed, "Seed for --b random");
  cmd.add_option("--known-solution", p.known_solution, "Set b = -A x* for this x*")
      ->delimiter(',');
  cmd.add_option("--matrix", p.matrix_file, "MatrixMarket file")->check(CLI::ExistingFile);
  cmd.add_option("--rhs", p.rhs_file, "b vector file, one value per line")
      ->check(CLI::ExistingFile);
}

void add_solver_options(CLI::App& cmd, RunOptions& r) {
  cmd.add_option("--stepsize", r.stepsize, "exact or orthogonal")
      ->check(CLI::IsMember({"exact", "orthogonal"}));
  cmd.add_option("--beta", r.beta, "fr, hs, prp or dy")->check(CLI::IsMember({"fr", "hs", "prp", "dy"}));
  cmd.add_option("--grad-update", r.grad_update, "recurrence or explicit")
      ->check(CLI::IsMember({"recurrence", "explicit"}));
  cmd.add_option("--tol", r.tol, "Relative gradient tolerance (stop when |g| <= tol*|g0|)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--max-iters", r.max_iters, "Iteration cap (default n)")->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App& cmd, RunOptions& r) {
  cmd.add_option("--format", r.format, "structured or tabular")
      ->check(CLI::IsMember({"structured", "tabular"}));
  cmd.add_option("--output", r.output, "Output file, '-' for stdout");
  cmd.add_flag("--no-timestamp", r.no_timestamp, "Omit the timestamp for byte-identical output");
  cmd.add_flag("--include-vectors,--verbose", r.include_vectors, "Include x, g, d per iteration");
}

struct LoadedProblem {
  QuadraticProblem problem;
  std::string description;
};

SpectrumDistribution distribution(const std::string& s) {
  if (s == "linear") return SpectrumDistribution::Linear;
  if (s == "clustered") return SpectrumDistribution::Clustered;
  return SpectrumDistribution::LogUniform;
}

LoadedProblem load_problem(const ProblemOptions& p) {
  const bool builtin = !p.builtin.empty();
  const bool file = !p.matrix_file.empty();
  if (builtin == file) throw InvalidArgument("give exactly one problem source: --builtin or --matrix");
  if (!p.known_solution.empty() && (!p.b_mode.empty() || !p.rhs_file.empty()))
    throw InvalidArgument("--known-solution cannot be combined with --b or --rhs");
  if (!p.rhs_file.empty() && !p.b_mode.empty())
    throw InvalidArgument("--rhs cannot be combined with --b");

  if (file) {
    std::ifstream in(p.matrix_file);
    if (!in) throw InvalidArgument("cannot open " + p.matrix_file);
    SpdMatrix a = read_matrix_market(in);
    const std::size_t n = a.order();
    Vector b(n, 1.0);
    std::string rhs_label = "ones";
    if (!p.rhs_file.empty()) {
      std::ifstream rin(p.rhs_file);
      if (!rin) throw InvalidArgument("cannot open " + p.rhs_file);
      b = read_vector(rin);
      rhs_label = p.rhs_file;
    } else if (p.b_mode == "random") {
      b = random_vector(n, p.b_seed);
      rhs_label = "random(" + std::to_string(p.b_seed) + ")";
    } else if (!p.known_solution.empty()) {
      if (p.known_solution.size() != n) throw DimensionError("--known-solution length differs from n");
      b = matvec(a, p.known_solution);
      for (double& v : b) v = -v;
      rhs_label = "-A*x_known";
    }
    return {QuadraticProblem(std::move(a), std::move(b)), p.matrix_file + " b=" + rhs_label};
  }
  if (!p.rhs_file.empty()) throw InvalidArgument("--rhs needs --matrix");

  BuiltinProblemSpec spec;
  spec.family = family_from_string(p.builtin);
  if (p.n) {
    spec.n = *p.n;
  } else if (spec.family == ProblemFamily::Diagonal && !p.eigs.empty()) {
    spec.n = p.eigs.size();
  } else if (!p.known_solution.empty()) {
    spec.n = p.known_solution.size();
  } else {
    throw InvalidArgument("--n is required for --builtin " + p.builtin);
  }
  if (!p.eigs.empty() && spec.family != ProblemFamily::Diagonal)
    throw InvalidArgument("--eigs only applies to --builtin diagonal");
  if (p.cond && spec.family != ProblemFamily::RandomSpd)
    throw InvalidArgument("--cond only applies to --builtin random_spd");
  spec.eigenvalues = p.eigs;
  if (spec.family == ProblemFamily::RandomSpd) {
    if (!p.cond) throw InvalidArgument("--builtin random_spd needs --cond");
    spec.spectrum = SpectrumSpec::range(p.lambda_min, p.lambda_min * *p.cond, distribution(p.spectrum));
  }
  spec.seed = p.seed;
  if (!p.known_solution.empty())
    spec.rhs = RhsKnownSolution{p.known_solution};
  else if (p.b_mode == "random")
    spec.rhs = RhsRandom{p.b_seed};
  return {builtin_problem(spec), spec.describe()};
}

SolverConfig make_config(const RunOptions& r) {
  SolverConfig c;
  c.stepsize = r.stepsize == "orthogonal" ? StepsizeRule::GradientOrthogonality
                                          : StepsizeRule::ExactLineSearch;
  if (r.beta == "hs") c.beta = BetaRule::HestenesStiefel;
  if (r.beta == "prp") c.beta = BetaRule::PolakRibierePolyak;
  if (r.beta == "dy") c.beta = BetaRule::DaiYuan;
  c.gradient_update = r.grad_update == "explicit" ? GradientUpdate::Explicit : GradientUpdate::Recurrence;
  if (r.tol) c.relative_tolerance = *r.tol;
  c.max_iterations = r.max_iters;
  c.validate();
  return c;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OutputFormat output_format(const RunOptions& r) {
  return r.format == "tabular" ? OutputFormat::Tabular : OutputFormat::Structured;
}

void emit(const RunOptions& r, const std::string& text, std::ostream& out) {
  if (r.output.empty()) return;
  if (r.output == "-") {
    out << text;
    return;
  }
  std::ofstream file(r.output, std::ios::binary);
  if (!file) throw InvalidArgument("cannot write " + r.output);
  file << text;
  if (!file) throw InvalidArgument("failed writing " + r.output);
}

TraceDocument document(const LoadedProblem& p, const IterationTrace& trace, const RunOptions& r) {
  TraceDocumentOptions opts;
  opts.description = p.description;
  opts.include_vectors = r.include_vectors;
  if (!r.no_timestamp) opts.timestamp = utc_timestamp();
  return make_trace_document(p.problem, trace, opts);
}

void print_summary(const LoadedProblem& p, const IterationTrace& trace, std::ostream& out) {
  out << "problem: " << p.description << '\n'
      << "iterations: " << trace.terminated_at << '\n'
      << "termination: " << to_string(trace.reason) << '\n'
      << "final |g|: " << shortest(norm(trace.final_g)) << '\n'
      << "f(x): " << shortest(p.problem.objective(trace.final_x)) << '\n';
  if (!trace.breakdown_detail.empty()) out << "breakdown: " << trace.breakdown_detail << '\n';
}

int solve_exit_code(const IterationTrace& trace) {
  switch (trace.reason) {
    case TerminationReason::GradientBelowTolerance: return kOk;
    case TerminationReason::IterationCap: return kIterationCap;
    case TerminationReason::Breakdown: return kBreakdown;
  }
  return kError;
}

int cmd_solve(const ProblemOptions& po, const RunOptions& r, std::ostream& out) {
  const auto p = load_problem(po);
  const auto result = solve(p.problem, make_config(r));
  emit(r, write_trace(document(p, result.trace, r), output_format(r)), out);
  print_summary(p, result.trace, out);
  return solve_exit_code(result.trace);
}

int cmd_verify(const ProblemOptions& po, const RunOptions& r, std::ostream& out) {
  const auto p = load_problem(po);
  const auto result = solve(p.problem, make_config(r));
  VerifyOptions vo;
  vo.tolerance = r.check_tol;
  const auto report = verify_trace(result.trace, p.problem, vo);
  const auto detail = r.full_report ? ReportDetail::Full : ReportDetail::FailuresOnly;
  emit(r, write_report(report, output_format(r), detail), out);

  print_summary(p, result.trace, out);
  out << "tolerance: " << shortest(report.tolerance) << " (" << to_string(report.regime)
      << ")\n";
  if (report.condition_estimate)
    out << "condition estimate: " << shortest(*report.condition_estimate) << '\n';
  for (const auto& c : report.checks)
    out << "  " << (c.passed ? "pass" : "FAIL") << "  " << to_string(c.id)
        << "  worst=" << shortest(c.worst_violation) << '\n';
  out << "exact arithmetic compliance: not claimed\n";
  out << (report.passed() ? "all identities hold within tolerance\n"
                          : "identity violations detected\n");
  return report.passed() ? kOk : kCheckFailed;
}

int cmd_compare(const ProblemOptions& po, const RunOptions& r, std::ostream& out) {
  const auto p = load_problem(po);
  SolverConfig config = make_config(r);
  config.evaluate_both_stepsizes = true;
  const auto result = solve(p.problem, config);
  emit(r, write_trace(document(p, result.trace, r), output_format(r)), out);

  const auto report = check_stepsize_equivalence(result.trace, r.compare_tol);
  const auto* check = report.find(IdentityId::StepsizeEquivalence);
  std::size_t worst_k = 0;
  for (const auto& res : check->residuals)
    if (std::abs(res.normalized) == check->worst_violation) worst_k = res.i;
  out << "problem: " << p.description << '\n'
      << "iterations: " << result.trace.terminated_at << '\n'
      << "max |alpha_exact - alpha_orth| / alpha_exact: " << shortest(check->worst_violation);
  if (!check->residuals.empty()) out << " at k=" << worst_k;
  out << '\n' << "tolerance: " << shortest(r.compare_tol) << '\n';
  return check->passed ? kOk : kCheckFailed;
}

int cmd_generate(const ProblemOptions& po, const RunOptions& r, std::ostream& out) {
  if (!po.matrix_file.empty()) throw InvalidArgument("generate needs --builtin");
  const auto p = load_problem(po);
  const std::string mtx = r.prefix + ".mtx";
  const std::string rhs = r.prefix + ".b";
  {
    std::ofstream f(mtx, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + mtx);
    write_matrix_market(f, p.problem.matrix().matrix());
  }
  {
    std::ofstream f(rhs, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + rhs);
    f << "% b vector for " << p.description << '\n';
    write_vector(f, p.problem.rhs());
  }
  out << "wrote " << mtx << " and " << rhs << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear conjugate gradient solver with identity verification", "lincg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LINCG_VERSION);

  ProblemOptions po;
  RunOptions ro;

  auto* solve_cmd = app.add_subcommand("solve", "Solve and write the iteration trace");
  auto* verify_cmd = app.add_subcommand("verify", "Solve, then check every CG identity on the trace");
  auto* compare_cmd = app.add_subcommand("compare", "Compare the two stepsize formulas per iteration");
  auto* generate_cmd = app.add_subcommand("generate", "Write a builtin problem as MatrixMarket plus b");

  for (auto* cmd : {solve_cmd, verify_cmd, compare_cmd, generate_cmd}) add_problem_options(*cmd, po);
  for (auto* cmd : {solve_cmd, verify_cmd, compare_cmd}) {
    add_solver_options(*cmd, ro);
    add_output_options(*cmd, ro);
  }
  verify_cmd->add_option("--check-tol", ro.check_tol, "Override the identity tolerance")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--full-report", ro.full_report, "List every residual, not only failures");
  compare_cmd->add_option("--compare-tol", ro.compare_tol, "Allowed relative stepsize discrepancy")
      ->check(CLI::NonNegativeNumber);
  generate_cmd->add_option("--prefix", ro.prefix, "Writes PREFIX.mtx and PREFIX.b")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << LINCG_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(po, ro, out);
    if (verify_cmd->parsed()) return cmd_verify(po, ro, out);
    if (compare_cmd->parsed()) return cmd_compare(po, ro, out);
    return cmd_generate(po, ro, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace lincg::cli
