#include "tvpt/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "tvpt/diffop.hpp"
#include "tvpt/isotonic.hpp"
#include "tvpt/parallel.hpp"
#include "tvpt/pattern.hpp"

namespace tvpt {
namespace {

TEST(SparseGradientSignal, Structure) {
  EXPECT_TRUE(random_sparse_gradient_signal(10, 0, 1).isZero(0.0));
  const Vector dense = random_sparse_gradient_signal(10, 9, 2);
  EXPECT_EQ(extract_pattern(dense).flat_count(), 0);
  for (int seed = 0; seed < 20; ++seed) {
    const Vector x = random_sparse_gradient_signal(50, 7, static_cast<std::uint64_t>(seed));
    EXPECT_EQ(x[0], 0.0);
    EXPECT_DOUBLE_EQ(tv_seminorm(x), 7.0);
    EXPECT_EQ(extract_pattern(x).fixed_count(), 7);
  }
  const Vector gaussian = random_sparse_gradient_signal(50, 7, 3, AmplitudeLaw::kGaussian);
  EXPECT_EQ(extract_pattern(gaussian).fixed_count(), 7);
  EXPECT_THROW(random_sparse_gradient_signal(10, 10, 1), std::invalid_argument);
}

TEST(GaussianMatrix, Moments) {
  const Matrix A = random_gaussian_matrix(1000, 1000, 4);
  const double count = 1e6;
  const double mean = A.sum() / count;
  const double var = (A.array() - mean).square().sum() / (count - 1.0);
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(count));
  // Var of the sample variance for N(0,1) is 2/(N-1).
  EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt(2.0 / count));
  EXPECT_NE(random_gaussian_matrix(3, 3, 1), random_gaussian_matrix(3, 3, 2));
  EXPECT_EQ(random_gaussian_matrix(3, 3, 1), random_gaussian_matrix(3, 3, 1));
}

TEST(RunCell, FullMeasurementsAlwaysRecover) {
  const EmpiricalCell c = run_cell(20, 20, 5, 8, 1);
  EXPECT_EQ(c.successes, 8);
  EXPECT_EQ(c.trials, 8);
}

TEST(RunCell, OneMeasurementOfDenseGradientFails) {
  CellOptions o;
  o.solve.max_iter = 20000;
  CellDiagnostics diag;
  const EmpiricalCell c = run_cell(12, 1, 11, 6, 2, o, &diag);
  EXPECT_EQ(c.successes, 0);
  EXPECT_EQ(diag.relative_errors.size(), 6U);
  EXPECT_THROW(run_cell(12, 0, 3, 1, 1), std::invalid_argument);
  EXPECT_THROW(run_cell(12, 3, 3, 0, 1), std::invalid_argument);
}

TEST(RunCell, SuccessRateGrowsWithMeasurements) {
  const EmpiricalCell low = run_cell(40, 8, 4, 20, cell_seed(3, 4, 8));
  const EmpiricalCell high = run_cell(40, 30, 4, 20, cell_seed(3, 4, 30));
  EXPECT_LE(low.successes, high.successes);
  EXPECT_EQ(high.successes, 20);
}

TEST(RunCell, DeterministicAcrossThreadCounts) {
  set_thread_count(1);
  const EmpiricalCell a = run_cell(30, 12, 3, 6, 77);
  set_thread_count(3);
  const EmpiricalCell b = run_cell(30, 12, 3, 6, 77);
  set_thread_count(0);
  EXPECT_EQ(a, b);
}

TEST(Isotonic, PoolsViolators) {
  const std::vector<double> values{0.0, 0.4, 0.2, 0.8, 0.6, 1.0};
  const std::vector<double> fitted = isotonic_increasing(values);
  const std::vector<double> expected{0.0, 0.3, 0.3, 0.7, 0.7, 1.0};
  ASSERT_EQ(fitted.size(), expected.size());
  for (std::size_t i = 0; i < fitted.size(); ++i) EXPECT_NEAR(fitted[i], expected[i], 1e-15);

  const std::vector<double> weights{1.0, 3.0};
  const std::vector<double> pair{1.0, 0.0};
  const std::vector<double> weighted = isotonic_increasing(pair, weights);
  EXPECT_NEAR(weighted[0], 0.25, 1e-15);
  EXPECT_NEAR(weighted[1], 0.25, 1e-15);
  EXPECT_THROW(isotonic_increasing(pair, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Isotonic, ResultIsMonotoneAndPreservesMean) {
  std::vector<double> values;
  for (int i = 0; i < 200; ++i) values.push_back(std::sin(0.37 * i) + 0.01 * i);
  const std::vector<double> fitted = isotonic_increasing(values);
  double sum_in = 0.0;
  double sum_out = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum_in += values[i];
    sum_out += fitted[i];
    if (i > 0) EXPECT_LE(fitted[i - 1], fitted[i]);
  }
  EXPECT_NEAR(sum_in, sum_out, 1e-10);
}

EmpiricalCell cell(Index m, int successes) { return {100, m, 10, 10, successes, 0}; }

TEST(TransitionFromCells, InterpolatesIsotonicCurve) {
  // Rates 0, 0.2, 0.6 (jitter to 0.4), 0.8, 1.0 at m = 10..50.
  const TransitionEstimate e =
      transition_from_cells(0.1, {cell(30, 4), cell(10, 0), cell(20, 2), cell(40, 8), cell(50, 10)});
  EXPECT_TRUE(e.bracketed);
  EXPECT_NEAR(e.delta_50, 0.325, 1e-12);
  EXPECT_NEAR(e.delta_10, 0.15, 1e-12);
  EXPECT_NEAR(e.delta_90, 0.45, 1e-12);
  EXPECT_LE(e.delta_10, e.delta_50);
  EXPECT_LE(e.delta_50, e.delta_90);
  EXPECT_EQ(e.cells.front().m, 10);

  const TransitionEstimate jitter = transition_from_cells(0.1, {cell(10, 0), cell(20, 6), cell(30, 4), cell(40, 10)});
  EXPECT_NEAR(jitter.fitted_rates[1], 0.5, 1e-15);
  EXPECT_NEAR(jitter.fitted_rates[2], 0.5, 1e-15);
  EXPECT_NEAR(jitter.delta_50, 0.2, 1e-12);
}

TEST(TransitionFromCells, FlagsUnbracketedGrids) {
  EXPECT_FALSE(transition_from_cells(0.1, {cell(10, 9), cell(20, 10)}).bracketed);
  EXPECT_FALSE(transition_from_cells(0.1, {cell(10, 0), cell(20, 3)}).bracketed);
  EXPECT_THROW(transition_from_cells(0.1, {}), std::invalid_argument);
  EmpiricalCell other = cell(30, 3);
  other.k = 11;
  EXPECT_THROW(transition_from_cells(0.1, {cell(10, 0), other}), std::invalid_argument);
}

TEST(EmpiricalTransition, DenseGradientsNeedFullSampling) {
  CellOptions o;
  o.solve.max_iter = 20000;
  const TransitionEstimate e = empirical_transition(30, 1.0, {0.7, 0.8, 0.9, 0.967, 1.0}, 6, 5, o);
  EXPECT_GE(e.delta_50, 0.95);
  EXPECT_THROW(empirical_transition(30, 0.1, {}, 2, 1), std::invalid_argument);
  EXPECT_THROW(empirical_transition(30, 0.1, {0.5, 0.4}, 2, 1), std::invalid_argument);
  EXPECT_THROW(empirical_transition(30, 0.1, {0.0, 0.4}, 2, 1), std::invalid_argument);
}

TEST(CompareReport, PairsGrids) {
  CurvePoint p;
  p.epsilon = 0.2;
  p.delta_pred = 0.5;
  p.std_error = 0.01;
  TransitionEstimate e = transition_from_cells(0.2, {cell(40, 0), cell(50, 5), cell(60, 10)});
  const auto rows = compare_report({p}, {e});
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_NEAR(rows[0].abs_diff, 0.0, 1e-12);
  EXPECT_TRUE(rows[0].pass);
  EXPECT_NEAR(rows[0].combined_uncertainty, 0.01 + 0.5 * (e.delta_90 - e.delta_10), 1e-15);

  p.delta_pred = 0.6;
  EXPECT_FALSE(compare_report({p}, {e})[0].pass);
  EXPECT_THROW(compare_report({}, {}), std::invalid_argument);
  EXPECT_THROW(compare_report({p, p}, {e}), std::invalid_argument);
  e.epsilon = 0.3;
  EXPECT_THROW(compare_report({p}, {e}), std::invalid_argument);
}

}  // namespace
}  // namespace tvpt
