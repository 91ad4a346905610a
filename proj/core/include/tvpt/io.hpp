#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvpt/common.hpp"
#include "tvpt/experiments.hpp"
#include "tvpt/geometry.hpp"
#include "tvpt/pattern.hpp"

namespace tvpt::io {

/// Malformed or unreadable input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip form is not needed; 17 significant digits always
/// parse back to the same double.
std::string format_double(double value);

inline constexpr const char* kCurveColumns = "epsilon,delta_pred,stderr,lambda_star,samples,n,seed";
inline constexpr const char* kCellColumns = "n,m,k,trials,successes,seed";
inline constexpr const char* kComparisonColumns =
    "epsilon,delta_pred,pred_stderr,delta_50,delta_10,delta_90,abs_diff,pass";

/// CSV writers emit an optional "# ..." provenance line, the column row, then
/// one data row per record. Readers skip '#' lines and check the column row.
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve,
                     const std::string& provenance = {});
std::vector<CurvePoint> read_curve_csv(std::istream& in);

void write_cells_csv(std::ostream& out, const std::vector<EmpiricalCell>& cells,
                     const std::string& provenance = {});
std::vector<EmpiricalCell> read_cells_csv(std::istream& in);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows,
                          const std::string& provenance = {});
std::vector<ComparisonRow> read_comparison_csv(std::istream& in);

/// One decimal number per line; blank and '#' lines are ignored.
Vector read_signal(std::istream& in);
void write_signal(std::ostream& out, const Vector& x);

/// Row-major CSV matrix, one row per line.
Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& A);

/// Certificate record: n, groups, max_abs, row_residual,
/// orthogonality_residual, pass, plus v0 and the tolerance used.
std::string certificate_json(const GradientPattern& pattern, const SubgradientCertificate& cert);

std::string sandwich_json(const SandwichReport& report);

}  // namespace tvpt::io
