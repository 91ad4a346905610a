#include "tvpt/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace tvpt::io {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) fields.push_back(trim(field));
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw FormatError("line " + std::to_string(line) + ": expected a number, got '" + text + "'");
}

template <typename Int>
Int parse_int(const std::string& text, std::size_t line) {
  Int value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError("line " + std::to_string(line) + ": expected an integer, got '" + text + "'");
  }
  return value;
}

void write_preamble(std::ostream& out, const std::string& provenance, const char* columns) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << columns << '\n';
}

// Data rows of a CSV with the given column row, split into fields.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(std::istream& in,
                                                                         const char* columns) {
  const std::vector<std::string> expected = split(columns, ',');
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<std::string> fields = split(body, ',');
    if (!have_header) {
      if (fields != expected) {
        throw FormatError("line " + std::to_string(number) + ": expected columns '" + columns + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != expected.size()) {
      throw FormatError("line " + std::to_string(number) + ": expected " +
                        std::to_string(expected.size()) + " fields");
    }
    rows.emplace_back(number, std::move(fields));
  }
  if (!have_header) throw FormatError(std::string("missing column row '") + columns + "'");
  return rows;
}

bool parse_bool(const std::string& text, std::size_t line) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw FormatError("line " + std::to_string(line) + ": expected 0 or 1, got '" + text + "'");
}

nlohmann::json finite_or_null(double value) {
  return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(nullptr);
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve,
                     const std::string& provenance) {
  write_preamble(out, provenance, kCurveColumns);
  for (const CurvePoint& p : curve) {
    out << format_double(p.epsilon) << ',' << format_double(p.delta_pred) << ','
        << format_double(p.std_error) << ',' << format_double(p.lambda_star) << ',' << p.samples << ','
        << p.n << ',' << p.seed << '\n';
  }
}

std::vector<CurvePoint> read_curve_csv(std::istream& in) {
  std::vector<CurvePoint> curve;
  for (const auto& [line, f] : read_rows(in, kCurveColumns)) {
    CurvePoint p;
    p.epsilon = parse_double(f[0], line);
    p.delta_pred = parse_double(f[1], line);
    p.std_error = parse_double(f[2], line);
    p.lambda_star = parse_double(f[3], line);
    p.samples = parse_int<int>(f[4], line);
    p.n = parse_int<Index>(f[5], line);
    p.seed = parse_int<std::uint64_t>(f[6], line);
    curve.push_back(p);
  }
  return curve;
}

void write_cells_csv(std::ostream& out, const std::vector<EmpiricalCell>& cells,
                     const std::string& provenance) {
  write_preamble(out, provenance, kCellColumns);
  for (const EmpiricalCell& c : cells) {
    out << c.n << ',' << c.m << ',' << c.k << ',' << c.trials << ',' << c.successes << ',' << c.seed
        << '\n';
  }
}

std::vector<EmpiricalCell> read_cells_csv(std::istream& in) {
  std::vector<EmpiricalCell> cells;
  for (const auto& [line, f] : read_rows(in, kCellColumns)) {
    EmpiricalCell c;
    c.n = parse_int<Index>(f[0], line);
    c.m = parse_int<Index>(f[1], line);
    c.k = parse_int<Index>(f[2], line);
    c.trials = parse_int<int>(f[3], line);
    c.successes = parse_int<int>(f[4], line);
    c.seed = parse_int<std::uint64_t>(f[5], line);
    if (c.successes < 0 || c.successes > c.trials) {
      throw FormatError("line " + std::to_string(line) + ": successes outside [0, trials]");
    }
    cells.push_back(c);
  }
  return cells;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows,
                          const std::string& provenance) {
  write_preamble(out, provenance, kComparisonColumns);
  for (const ComparisonRow& r : rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.delta_pred) << ','
        << format_double(r.pred_stderr) << ',' << format_double(r.delta_50) << ','
        << format_double(r.delta_10) << ',' << format_double(r.delta_90) << ','
        << format_double(r.abs_diff) << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

std::vector<ComparisonRow> read_comparison_csv(std::istream& in) {
  std::vector<ComparisonRow> rows;
  for (const auto& [line, f] : read_rows(in, kComparisonColumns)) {
    ComparisonRow r;
    r.epsilon = parse_double(f[0], line);
    r.delta_pred = parse_double(f[1], line);
    r.pred_stderr = parse_double(f[2], line);
    r.delta_50 = parse_double(f[3], line);
    r.delta_10 = parse_double(f[4], line);
    r.delta_90 = parse_double(f[5], line);
    r.abs_diff = parse_double(f[6], line);
    r.pass = parse_bool(f[7], line);
    r.combined_uncertainty = r.pred_stderr + 0.5 * (r.delta_90 - r.delta_10);
    rows.push_back(r);
  }
  return rows;
}

Vector read_signal(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    values.push_back(parse_double(body, number));
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

void write_signal(std::ostream& out, const Vector& x) {
  for (Index i = 0; i < x.size(); ++i) out << format_double(x[i]) << '\n';
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<double> row;
    for (const std::string& field : split(body, ',')) row.push_back(parse_double(field, number));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("line " + std::to_string(number) + ": ragged matrix row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("matrix file is empty");
  Matrix A(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) A(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return A;
}

void write_matrix_csv(std::ostream& out, const Matrix& A) {
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) out << (j > 0 ? "," : "") << format_double(A(i, j));
    out << '\n';
  }
}

std::string certificate_json(const GradientPattern& pattern, const SubgradientCertificate& cert) {
  nlohmann::json groups = nlohmann::json::array();
  for (const FlatGroup& g : pattern.groups()) groups.push_back({g.begin, g.end});
  std::vector<double> v0(cert.v0.data(), cert.v0.data() + cert.v0.size());
  nlohmann::ordered_json doc;
  doc["n"] = pattern.n();
  doc["groups"] = groups;
  doc["max_abs"] = finite_or_null(cert.max_abs);
  doc["row_residual"] = finite_or_null(cert.row_residual);
  doc["orthogonality_residual"] = finite_or_null(cert.orthogonality_residual);
  doc["pass"] = cert.pass;
  doc["tol"] = cert.tol;
  doc["samples"] = cert.samples;
  doc["v0"] = v0;
  return doc.dump(2);
}

std::string sandwich_json(const SandwichReport& r) {
  nlohmann::ordered_json doc;
  doc["n"] = r.n;
  doc["k"] = r.k;
  doc["samples"] = r.samples;
  doc["min_scaled"] = r.min_scaled;
  doc["min_scaled_stderr"] = r.min_scaled_std_error;
  doc["lambda_star"] = r.lambda_star;
  doc["lambda_capped"] = r.lambda_capped;
  doc["cone"] = r.cone;
  doc["cone_stderr"] = r.cone_std_error;
  doc["difference"] = r.difference;
  doc["difference_stderr"] = r.difference_std_error;
  doc["gap_bound"] = kSandwichGap;
  doc["pass"] = r.pass;
  return doc.dump(2);
}

}  // namespace tvpt::io
