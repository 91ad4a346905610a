#pragma once

#include <cstdint>
#include <vector>

#include "tvpt/common.hpp"
#include "tvpt/geometry.hpp"
#include "tvpt/solver.hpp"

namespace tvpt {

enum class AmplitudeLaw {
  /// Jumps of +1 or -1.
  kRademacher,
  /// Standard normal jumps.
  kGaussian,
};

/// Piecewise-constant signal with exactly k nonzero gradients at uniformly
/// random positions, built by prefix sums from x_0 = 0.
Vector random_sparse_gradient_signal(Index n, Index k, std::uint64_t seed,
                                     AmplitudeLaw law = AmplitudeLaw::kRademacher);

/// m x n matrix with i.i.d. standard normal entries.
Matrix random_gaussian_matrix(Index m, Index n, std::uint64_t seed);

/// Outcome of `trials` recovery experiments at one phase-plane point.
struct EmpiricalCell {
  Index n = 0;
  Index m = 0;
  Index k = 0;
  int trials = 0;
  int successes = 0;
  std::uint64_t seed = 0;

  double rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
  friend bool operator==(const EmpiricalCell&, const EmpiricalCell&) = default;
};

struct CellOptions {
  SolveOptions solve;
  double threshold = kDefaultSuccessThreshold;
  AmplitudeLaw amplitude = AmplitudeLaw::kRademacher;
};

struct CellDiagnostics {
  /// Trials counted as failures because the solver hit max_iter.
  int nonconverged = 0;
  std::vector<double> relative_errors;
};

/// Runs `trials` independent recoveries (fresh signal and matrix each) and
/// counts successes. A solve that does not converge counts as a failure.
EmpiricalCell run_cell(Index n, Index m, Index k, int trials, std::uint64_t seed,
                       const CellOptions& options = {}, CellDiagnostics* diagnostics = nullptr);

/// Seed used for the (k, m) cell of a sweep seeded with `seed`. Cells are
/// keyed by (k, m) rather than grid position so that editing a grid does not
/// reshuffle the remaining cells.
std::uint64_t cell_seed(std::uint64_t seed, Index k, Index m);

/// Measurement count for undersampling ratio delta: max(1, round(delta * n)).
Index measurement_count(Index n, double delta);

struct TransitionEstimate {
  double epsilon = 0.0;
  double delta_50 = 0.0;
  double delta_10 = 0.0;
  double delta_90 = 0.0;
  int trials_per_cell = 0;
  /// False when the fitted success curve never crosses 1/2 inside the grid.
  bool bracketed = false;
  std::vector<EmpiricalCell> cells;
  /// m / n for each cell, and the raw and isotonic success rates.
  std::vector<double> deltas;
  std::vector<double> raw_rates;
  std::vector<double> fitted_rates;
};

/// Reads the 10/50/90% crossings off a set of cells sharing (n, k). Rates are
/// projected onto nondecreasing curves in m before linear interpolation.
TransitionEstimate transition_from_cells(double epsilon, std::vector<EmpiricalCell> cells);

/// Runs one cell per delta in `delta_grid` (sorted, within (0, 1]) and
/// estimates the transition at sparsity fraction epsilon.
TransitionEstimate empirical_transition(Index n, double epsilon, const std::vector<double>& delta_grid,
                                        int trials, std::uint64_t seed, const CellOptions& options = {});

struct ComparisonRow {
  double epsilon = 0.0;
  double delta_pred = 0.0;
  double pred_stderr = 0.0;
  double delta_50 = 0.0;
  double delta_10 = 0.0;
  double delta_90 = 0.0;
  double abs_diff = 0.0;
  /// Monte Carlo standard error plus half the 10-90% band.
  double combined_uncertainty = 0.0;
  bool pass = false;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

inline constexpr double kDefaultCompareTolerance = 0.05;

/// Pairs predicted and empirical transitions on the same epsilon grid.
/// Throws std::invalid_argument for empty or mismatched grids.
std::vector<ComparisonRow> compare_report(const std::vector<CurvePoint>& predicted,
                                          const std::vector<TransitionEstimate>& empirical,
                                          double tolerance = kDefaultCompareTolerance);

}  // namespace tvpt
