#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "tvpt/common.hpp"
#include "tvpt/experiments.hpp"
#include "tvpt/geometry.hpp"
#include "tvpt/io.hpp"
#include "tvpt/pattern.hpp"
#include "tvpt/random.hpp"
#include "tvpt/solver.hpp"

namespace tvpt::cli {
namespace {

using Json = nlohmann::ordered_json;

/// Argument values that parse but are semantically invalid.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return value;
}

struct Settings {
  std::string command;
  Index n = 0;
  Index m = 0;
  Index k = 0;
  std::string eps_spec;
  std::string delta_spec;
  int samples = 500;
  int patterns = 5;
  int trials = 20;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::string out = "-";
  std::string format = "csv";
  std::string gnuplot;
  std::string signal;
  std::string matrix;
  std::string obs;
  std::string curve;
  std::string cells;
  std::string mode = "projection";
  int max_iter = SolveOptions{}.max_iter;
};

/// One command's primary output plus the fields echoed into its manifest.
struct Outcome {
  std::string body;
  Json config = Json::object();
  Json summary = Json::object();
  int exit_code = kExitOk;
};

std::string provenance_line(const std::string& command, const Json& config) {
  std::ostringstream line;
  line << "tvpt " << version() << ' ' << command;
  for (const auto& item : config.items()) {
    line << ' ' << item.key() << '=';
    if (item.value().is_string()) {
      line << item.value().get<std::string>();
    } else {
      line << item.value().dump();
    }
  }
  return line.str();
}

std::vector<double> checked_grid(const std::string& spec, const char* name) {
  std::vector<double> grid;
  try {
    grid = parse_grid(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--") + name + ": " + e.what());
  }
  for (const double v : grid) {
    if (!(v > 0.0 && v <= 1.0 + 1e-12)) {
      throw UsageError(std::string("--") + name + " values must lie in (0, 1]");
    }
  }
  for (double& v : grid) v = std::min(v, 1.0);
  return grid;
}

std::ifstream open_input(const std::string& path, const char* flag) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot read ") + flag + " file '" + path + "'");
  return in;
}

Json curve_json(const std::vector<CurvePoint>& curve) {
  Json rows = Json::array();
  for (const CurvePoint& p : curve) {
    rows.push_back(Json{{"epsilon", p.epsilon},
                        {"delta_pred", p.delta_pred},
                        {"stderr", p.std_error},
                        {"lambda_star", p.lambda_star},
                        {"samples", p.samples},
                        {"n", p.n},
                        {"seed", p.seed}});
  }
  return rows;
}

Json cells_json(const std::vector<EmpiricalCell>& cells) {
  Json rows = Json::array();
  for (const EmpiricalCell& c : cells) {
    rows.push_back(Json{{"n", c.n},
                        {"m", c.m},
                        {"k", c.k},
                        {"trials", c.trials},
                        {"successes", c.successes},
                        {"seed", c.seed}});
  }
  return rows;
}

Json comparison_json(const std::vector<ComparisonRow>& rows) {
  Json out = Json::array();
  for (const ComparisonRow& r : rows) {
    out.push_back(Json{{"epsilon", r.epsilon},
                       {"delta_pred", r.delta_pred},
                       {"pred_stderr", r.pred_stderr},
                       {"delta_50", r.delta_50},
                       {"delta_10", r.delta_10},
                       {"delta_90", r.delta_90},
                       {"abs_diff", r.abs_diff},
                       {"pass", r.pass}});
  }
  return out;
}

Json document(const std::string& command, const Json& config, Json data) {
  return Json{{"tool", "tvpt"}, {"version", version()}, {"command", command}, {"config", config},
              {"data", std::move(data)}};
}

Outcome cmd_predict(const Settings& s) {
  if (s.n < 2) throw UsageError("--n must be at least 2");
  if (s.samples < 2) throw UsageError("--samples must be at least 2");
  if (s.patterns < 1) throw UsageError("--patterns must be at least 1");
  const std::vector<double> grid = checked_grid(s.eps_spec, "eps");

  Outcome result;
  result.config = Json{{"n", s.n}, {"eps", s.eps_spec}, {"samples", s.samples},
                       {"patterns", s.patterns}, {"seed", s.seed}};
  CurveOptions options;
  options.patterns_per_eps = s.patterns;
  const std::vector<CurvePoint> curve = predicted_curve(s.n, grid, s.samples, s.seed, options);

  if (s.format == "json") {
    result.body = document("predict", result.config, curve_json(curve)).dump(2) + "\n";
  } else {
    std::ostringstream body;
    io::write_curve_csv(body, curve, provenance_line("predict", result.config));
    result.body = body.str();
  }
  if (!s.gnuplot.empty()) {
    std::ofstream plot(s.gnuplot);
    if (!plot) throw UsageError("cannot write --gnuplot file '" + s.gnuplot + "'");
    plot << "# epsilon delta_pred\n";
    for (const CurvePoint& p : curve) {
      plot << io::format_double(p.epsilon) << ' ' << io::format_double(p.delta_pred) << '\n';
    }
  }
  result.summary = Json{{"rows", curve.size()}};
  return result;
}

SolveOptions solve_options(const Settings& s) {
  SolveOptions options;
  options.mode = s.mode == "dual-block" ? ConstraintMode::kDualBlock : ConstraintMode::kProjection;
  options.max_iter = s.max_iter;
  if (s.max_iter < 1) throw UsageError("--max-iter must be positive");
  return options;
}

Outcome cmd_empirical(const Settings& s) {
  if (s.n < 2) throw UsageError("--n must be at least 2");
  if (s.trials < 1) throw UsageError("--trials must be at least 1");
  const bool single = s.m > 0 || s.k > 0;
  if (single && (!s.eps_spec.empty() || !s.delta_spec.empty())) {
    throw UsageError("use either --m/--k or --eps/--delta grids");
  }

  // (k, m) pairs in output order.
  std::vector<std::pair<Index, Index>> plan;
  if (single) {
    if (s.m < 1 || s.m > s.n) throw UsageError("--m must lie in [1, n]");
    if (s.k < 0 || s.k > s.n - 1) throw UsageError("--k must lie in [0, n-1]");
    plan.emplace_back(s.k, s.m);
  } else {
    if (s.eps_spec.empty() || s.delta_spec.empty()) throw UsageError("--eps and --delta are required");
    const std::vector<double> eps = checked_grid(s.eps_spec, "eps");
    const std::vector<double> delta = checked_grid(s.delta_spec, "delta");
    for (const double e : eps) {
      const Index k = gradient_count(s.n, e);
      Index previous_m = 0;
      for (const double d : delta) {
        const Index m = measurement_count(s.n, d);
        if (m == previous_m) continue;
        previous_m = m;
        plan.emplace_back(k, m);
      }
    }
  }

  Outcome result;
  result.config = Json{{"n", s.n}};
  if (single) {
    result.config["m"] = s.m;
    result.config["k"] = s.k;
  } else {
    result.config["eps"] = s.eps_spec;
    result.config["delta"] = s.delta_spec;
  }
  result.config["trials"] = s.trials;
  result.config["tol"] = s.tol;
  result.config["mode"] = s.mode;
  result.config["max_iter"] = s.max_iter;
  result.config["seed"] = s.seed;

  CellOptions options;
  options.solve = solve_options(s);
  options.threshold = s.tol;
  std::vector<EmpiricalCell> cells;
  int nonconverged = 0;
  for (const auto& [k, m] : plan) {
    CellDiagnostics diagnostics;
    cells.push_back(run_cell(s.n, m, k, s.trials, cell_seed(s.seed, k, m), options, &diagnostics));
    nonconverged += diagnostics.nonconverged;
  }

  if (s.format == "json") {
    result.body = document("empirical", result.config, cells_json(cells)).dump(2) + "\n";
  } else {
    std::ostringstream body;
    io::write_cells_csv(body, cells, provenance_line("empirical", result.config));
    result.body = body.str();
  }
  result.summary = Json{{"rows", cells.size()}, {"nonconverged_trials", nonconverged}};
  return result;
}

Outcome cmd_compare(const Settings& s) {
  if (s.curve.empty() || s.cells.empty()) throw UsageError("--curve and --cells are required");
  std::vector<CurvePoint> curve;
  std::vector<EmpiricalCell> cells;
  try {
    auto curve_in = open_input(s.curve, "--curve");
    curve = io::read_curve_csv(curve_in);
    auto cells_in = open_input(s.cells, "--cells");
    cells = io::read_cells_csv(cells_in);
  } catch (const io::FormatError& e) {
    throw UsageError(e.what());
  }
  if (curve.empty() || cells.empty()) throw UsageError("empty curve or cells file");

  // Each curve point owns the cells whose (n, k) it predicts.
  std::vector<TransitionEstimate> empirical;
  std::vector<bool> used(cells.size(), false);
  for (const CurvePoint& p : curve) {
    const Index k = gradient_count(p.n, p.epsilon);
    std::vector<EmpiricalCell> group;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].n == p.n && cells[i].k == k) {
        group.push_back(cells[i]);
        used[i] = true;
      }
    }
    if (group.empty()) {
      throw UsageError("no cells for epsilon " + io::format_double(p.epsilon) + " (n=" +
                       std::to_string(p.n) + ", k=" + std::to_string(k) + ")");
    }
    empirical.push_back(transition_from_cells(p.epsilon, std::move(group)));
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw UsageError("cells file contains (n, k) pairs absent from the curve");
  }

  const double tolerance = s.tol > 0.0 ? s.tol : kDefaultCompareTolerance;
  Outcome result;
  result.config = Json{{"curve", s.curve}, {"cells", s.cells}, {"tol", tolerance}};
  const std::vector<ComparisonRow> rows = compare_report(curve, empirical, tolerance);
  if (s.format == "json") {
    result.body = document("compare", result.config, comparison_json(rows)).dump(2) + "\n";
  } else {
    std::ostringstream body;
    io::write_comparison_csv(body, rows, provenance_line("compare", result.config));
    result.body = body.str();
  }
  const bool all_pass = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
  result.summary = Json{{"rows", rows.size()}, {"all_pass", all_pass}};
  return result;
}

Vector read_vector_file(const std::string& path, const char* flag) {
  auto in = open_input(path, flag);
  try {
    return io::read_signal(in);
  } catch (const io::FormatError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

Outcome cmd_certify(const Settings& s) {
  if (s.signal.empty()) throw UsageError("--signal is required");
  if (s.samples < 1) throw UsageError("--samples must be positive");
  const Vector x = read_vector_file(s.signal, "--signal");
  if (x.size() < 2) throw UsageError("--signal needs at least two values");

  Outcome result;
  const double tol = s.tol > 0.0 ? s.tol : 1e-9;
  result.config = Json{{"signal", s.signal}, {"tol", tol}, {"samples", s.samples}, {"seed", s.seed}};
  const GradientPattern pattern = extract_pattern(x);
  const SubgradientCertificate cert =
      verify_weak_decomposability(pattern, construct_v0(pattern), tol, s.samples, s.seed);
  result.body = io::certificate_json(pattern, cert) + "\n";
  result.summary = Json{{"pass", cert.pass}};
  result.exit_code = cert.pass ? kExitOk : kExitNumeric;
  return result;
}

Outcome cmd_solve(const Settings& s) {
  if (s.matrix.empty() || s.obs.empty()) throw UsageError("--matrix and --obs are required");
  Matrix A;
  try {
    auto in = open_input(s.matrix, "--matrix");
    A = io::read_matrix_csv(in);
  } catch (const io::FormatError& e) {
    throw UsageError(std::string("--matrix: ") + e.what());
  }
  const Vector y = read_vector_file(s.obs, "--obs");
  if (A.rows() != y.size()) throw UsageError("--obs length does not match the rows of --matrix");
  if (A.cols() < 2) throw UsageError("--matrix needs at least two columns");

  SolveOptions options = solve_options(s);
  if (s.tol > 0.0) options.feas_tol = s.tol;
  Outcome result;
  result.config = Json{{"matrix", s.matrix}, {"obs", s.obs}, {"tol", options.feas_tol},
                       {"mode", s.mode}, {"max_iter", s.max_iter}};
  SolveReport report;
  try {
    report = solve_tv_equality(A, y, options);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  result.summary = Json{{"iterations", report.iterations},
                        {"converged", report.converged},
                        {"feas_residual", report.feas_residual},
                        {"objective", report.objective},
                        {"operator_norm", report.operator_norm}};
  if (!s.signal.empty()) {
    const Vector x_star = read_vector_file(s.signal, "--signal");
    if (x_star.size() != A.cols()) throw UsageError("--signal length does not match the columns of --matrix");
    if (x_star.norm() > 0.0) {
      result.config["signal"] = s.signal;
      result.summary["relative_error"] = relative_error(report.x_hat, x_star);
      result.summary["success"] = recovery_success(report.x_hat, x_star);
    }
  }
  if (s.format == "json") {
    Json x = Json::array();
    for (Index i = 0; i < report.x_hat.size(); ++i) x.push_back(report.x_hat[i]);
    Json data = result.summary;
    data["x_hat"] = std::move(x);
    result.body = document("solve", result.config, std::move(data)).dump(2) + "\n";
  } else {
    std::ostringstream body;
    body << "# " << provenance_line("solve", result.config) << '\n';
    io::write_signal(body, report.x_hat);
    result.body = body.str();
  }
  result.exit_code = report.converged ? kExitOk : kExitNumeric;
  return result;
}

Outcome cmd_sandwich(const Settings& s) {
  if (s.n < 2) throw UsageError("--n must be at least 2");
  if (s.k < 0 || s.k > s.n - 1) throw UsageError("--k must lie in [0, n-1]");
  if (s.samples < 2) throw UsageError("--samples must be at least 2");
  Outcome result;
  result.config = Json{{"n", s.n}, {"k", s.k}, {"samples", s.samples}, {"seed", s.seed}};
  const GradientPattern pattern = random_pattern(s.n, s.k, derive_seed(s.seed, Stream::kPattern, 0));
  const SandwichReport report = sandwich_check(pattern, s.samples, s.seed);
  result.body = io::sandwich_json(report) + "\n";
  result.summary = Json{{"pass", report.pass}};
  result.exit_code = report.pass ? kExitOk : kExitNumeric;
  return result;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + path + "'");
  file << text;
  if (!file) throw UsageError("failed writing '" + path + "'");
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> fields;
  std::stringstream stream(spec);
  for (std::string field; std::getline(stream, field, ':');) fields.push_back(field);
  if (!spec.empty() && spec.back() == ':') fields.emplace_back();
  if (fields.size() == 1) return {parse_number(fields[0])};
  if (fields.size() != 3) throw std::invalid_argument("expected lo:hi:step, got '" + spec + "'");

  const double lo = parse_number(fields[0]);
  const double hi = parse_number(fields[1]);
  const double step = parse_number(fields[2]);
  if (lo > hi) throw std::invalid_argument("lo exceeds hi in '" + spec + "'");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive in '" + spec + "'");
  // The slack absorbs rounding in (hi - lo) / step so that hi itself is kept.
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw std::invalid_argument("grid '" + spec + "' is too long");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Phase transitions of 1-D total-variation minimization"};
  app.name(args.empty() ? "tvpt" : args.front());
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1, 1);

  auto add_common = [&s](CLI::App* cmd) {
    cmd->add_option("--seed", s.seed, "Master random seed");
    cmd->add_option("--out", s.out, "Output path, '-' for standard output");
  };
  auto add_format = [&s](CLI::App* cmd, std::vector<std::string> formats) {
    cmd->add_option("--format", s.format, "Output format")->check(CLI::IsMember(std::move(formats)));
  };
  auto add_solver = [&s](CLI::App* cmd) {
    cmd->add_option("--mode", s.mode, "Constraint handling in the solver")
        ->check(CLI::IsMember({"projection", "dual-block"}));
    cmd->add_option("--max-iter", s.max_iter, "Solver iteration cap");
  };

  CLI::App* predict = app.add_subcommand("predict", "Predicted transition curve delta(eps)");
  predict->add_option("--n", s.n, "Signal length")->required();
  predict->add_option("--eps", s.eps_spec, "Sparsity grid lo:hi:step")->required();
  predict->add_option("--samples", s.samples, "Gaussian samples per pattern");
  predict->add_option("--patterns", s.patterns, "Random patterns per epsilon");
  predict->add_option("--gnuplot", s.gnuplot, "Also write 'epsilon delta_pred' columns here");
  add_common(predict);
  add_format(predict, {"csv", "json"});

  CLI::App* empirical = app.add_subcommand("empirical", "Recovery experiments over the phase plane");
  empirical->add_option("--n", s.n, "Signal length")->required();
  empirical->add_option("--eps", s.eps_spec, "Sparsity grid lo:hi:step");
  empirical->add_option("--delta", s.delta_spec, "Undersampling grid lo:hi:step");
  empirical->add_option("--m", s.m, "Single cell: measurement count");
  empirical->add_option("--k", s.k, "Single cell: nonzero gradient count");
  empirical->add_option("--trials", s.trials, "Recovery trials per cell");
  empirical->add_option("--tol", s.tol, "Relative error counted as success");
  add_common(empirical);
  add_format(empirical, {"csv", "json"});
  add_solver(empirical);

  CLI::App* compare = app.add_subcommand("compare", "Compare a predicted curve with empirical cells");
  compare->add_option("--curve", s.curve, "Curve CSV from 'predict'")->required();
  compare->add_option("--cells", s.cells, "Cell CSV from 'empirical'")->required();
  compare->add_option("--tol", s.tol, "Allowed |delta_pred - delta_50|");
  add_common(compare);
  add_format(compare, {"csv", "json"});

  CLI::App* certify = app.add_subcommand("certify", "Check the subgradient certificate of a signal");
  certify->add_option("--signal", s.signal, "Signal file, one value per line")->required();
  certify->add_option("--tol", s.tol, "Residual tolerance");
  certify->add_option("--samples", s.samples, "Random subgradients for the orthogonality test");
  add_common(certify);
  add_format(certify, {"json"});

  CLI::App* solve = app.add_subcommand("solve", "Solve min ||Bx||_1 subject to Ax = y");
  solve->add_option("--matrix", s.matrix, "Row-major CSV matrix A")->required();
  solve->add_option("--obs", s.obs, "Observations y, one per line")->required();
  solve->add_option("--signal", s.signal, "Ground truth for error reporting");
  solve->add_option("--tol", s.tol, "Feasibility tolerance");
  add_common(solve);
  add_format(solve, {"csv", "json"});
  add_solver(solve);

  CLI::App* sandwich = app.add_subcommand("sandwich", "Compare the scaled and conic distances");
  sandwich->add_option("--n", s.n, "Signal length")->required();
  sandwich->add_option("--k", s.k, "Nonzero gradient count")->required();
  sandwich->add_option("--samples", s.samples, "Gaussian samples");
  add_common(sandwich);
  add_format(sandwich, {"json"});

  // Commands whose only format is JSON.
  for (CLI::App* cmd : {certify, sandwich}) {
    cmd->preparse_callback([&s](std::size_t) { s.format = "json"; });
  }

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  s.command = app.get_subcommands().front()->get_name();
  if (s.command == "empirical" && s.tol <= 0.0) s.tol = kDefaultSuccessThreshold;

  Outcome result;
  try {
    if (s.command == "predict") {
      result = cmd_predict(s);
    } else if (s.command == "empirical") {
      result = cmd_empirical(s);
    } else if (s.command == "compare") {
      result = cmd_compare(s);
    } else if (s.command == "certify") {
      result = cmd_certify(s);
    } else if (s.command == "solve") {
      result = cmd_solve(s);
    } else {
      result = cmd_sandwich(s);
    }

    if (s.out == "-") {
      out << result.body;
    } else {
      write_text(s.out, result.body);
      const Json manifest{{"tool", "tvpt"},
                          {"version", version()},
                          {"command", s.command},
                          {"config", result.config},
                          {"output", s.out},
                          {"format", s.format},
                          {"exit_code", result.exit_code},
                          {"summary", result.summary}};
      write_text(s.out + ".manifest.json", manifest.dump(2) + "\n");
    }
  } catch (const UsageError& e) {
    err << "tvpt " << s.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "tvpt " << s.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "tvpt " << s.command << ": " << e.what() << '\n';
    return kExitNumeric;
  }
  if (result.exit_code != kExitOk) {
    err << "tvpt " << s.command << ": check failed, see " << (s.out == "-" ? "output" : s.out) << '\n';
  }
  return result.exit_code;
}

}  // namespace tvpt::cli
