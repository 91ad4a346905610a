#include "tvpt/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <limits>
#include "json.hpp"
#include <sstream>

#include "tvpt/pattern.hpp"
#include "tvpt/random.hpp"

namespace tvpt {
namespace {

TEST(FormatDouble, RoundTripsExactly) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.gaussian() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(std::strtod(io::format_double(std::numeric_limits<double>::denorm_min()).c_str(), nullptr),
            std::numeric_limits<double>::denorm_min());
}

TEST(CurveCsv, RoundTrip) {
  Rng rng(4);
  std::vector<CurvePoint> curve;
  for (int i = 0; i < 30; ++i) {
    CurvePoint p;
    p.epsilon = rng.uniform();
    p.delta_pred = rng.uniform();
    p.std_error = rng.uniform() * 1e-3;
    if (i % 3 != 0) p.lambda_star = rng.uniform() * 5.0;
    p.samples = static_cast<int>(rng.below(5000)) + 1;
    p.n = static_cast<Index>(rng.below(1000)) + 2;
    p.seed = rng.next_u64();
    curve.push_back(p);
  }
  std::stringstream buffer;
  io::write_curve_csv(buffer, curve, "tvpt predict --n 10");
  EXPECT_EQ(buffer.str().substr(0, 2), "# ");
  EXPECT_EQ(io::read_curve_csv(buffer), curve);
}

TEST(CellsCsv, RoundTrip) {
  std::vector<EmpiricalCell> cells{{200, 68, 20, 50, 28, 0xffffffffffffffffULL}, {10, 1, 9, 3, 0, 0}};
  std::stringstream buffer;
  io::write_cells_csv(buffer, cells);
  EXPECT_EQ(io::read_cells_csv(buffer), cells);
}

TEST(ComparisonCsv, RoundTripOfWrittenColumns) {
  ComparisonRow row;
  row.epsilon = 0.1;
  row.delta_pred = 0.3407;
  row.pred_stderr = 0.002;
  row.delta_50 = 0.33;
  row.delta_10 = 0.29;
  row.delta_90 = 0.37;
  row.abs_diff = 0.0107;
  row.pass = true;
  std::stringstream buffer;
  io::write_comparison_csv(buffer, {row});
  const auto back = io::read_comparison_csv(buffer);
  ASSERT_EQ(back.size(), 1U);
  EXPECT_EQ(back[0].delta_50, row.delta_50);
  EXPECT_EQ(back[0].abs_diff, row.abs_diff);
  EXPECT_TRUE(back[0].pass);
}

TEST(CsvReaders, RejectMalformedInput) {
  std::stringstream wrong_header("a,b,c\n1,2,3\n");
  EXPECT_THROW(io::read_cells_csv(wrong_header), io::FormatError);
  std::stringstream short_row(std::string(io::kCellColumns) + "\n1,2,3\n");
  EXPECT_THROW(io::read_cells_csv(short_row), io::FormatError);
  std::stringstream garbage(std::string(io::kCellColumns) + "\n1,2,x,4,5,6\n");
  EXPECT_THROW(io::read_cells_csv(garbage), io::FormatError);
  std::stringstream empty;
  EXPECT_THROW(io::read_curve_csv(empty), io::FormatError);
}

TEST(SignalFile, RoundTripAndErrors) {
  Rng rng(5);
  const Vector x = rng.gaussian_vector(25);
  std::stringstream buffer;
  io::write_signal(buffer, x);
  EXPECT_EQ(io::read_signal(buffer), x);
  std::stringstream comments("# header\n1.5\n\n-2\n");
  const Vector parsed = io::read_signal(comments);
  ASSERT_EQ(parsed.size(), 2);
  EXPECT_EQ(parsed[1], -2.0);
  std::stringstream bad("1\nabc\n");
  EXPECT_THROW(io::read_signal(bad), io::FormatError);
}

TEST(MatrixFile, RoundTripAndRagged) {
  Rng rng(6);
  Matrix A(4, 7);
  for (Index i = 0; i < A.size(); ++i) A.data()[i] = rng.gaussian();
  std::stringstream buffer;
  io::write_matrix_csv(buffer, A);
  EXPECT_EQ(io::read_matrix_csv(buffer), A);
  std::stringstream ragged("1,2\n3\n");
  EXPECT_THROW(io::read_matrix_csv(ragged), io::FormatError);
}

TEST(CertificateJson, OrderedFields) {
  const GradientPattern p = extract_pattern(Vector{{0.0, 1.0, 1.0, 1.0, 0.0}});
  const auto cert = verify_weak_decomposability(p, construct_v0(p), 1e-10, 100, 1);
  const nlohmann::ordered_json j = nlohmann::ordered_json::parse(io::certificate_json(p, cert));
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  ASSERT_GE(keys.size(), 6U);
  EXPECT_EQ(std::vector<std::string>(keys.begin(), keys.begin() + 6),
            (std::vector<std::string>{"n", "groups", "max_abs", "row_residual", "orthogonality_residual", "pass"}));
  EXPECT_EQ(j["n"], 5);
  EXPECT_EQ(j["groups"], nlohmann::json::parse("[[1,2]]"));
  EXPECT_TRUE(j["pass"].get<bool>());
}

}  // namespace
}  // namespace tvpt
