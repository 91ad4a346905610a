#include "tvpt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tvpt/isotonic.hpp"
#include "tvpt/parallel.hpp"
#include "tvpt/random.hpp"

namespace tvpt {

Vector random_sparse_gradient_signal(Index n, Index k, std::uint64_t seed, AmplitudeLaw law) {
  if (n < 2) throw std::invalid_argument("signal length must be >= 2");
  if (k < 0 || k > n - 1) {
    throw std::invalid_argument("number of jumps must lie in [0, n-1], got " + std::to_string(k));
  }
  const auto size = static_cast<std::size_t>(n - 1);
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  Vector jumps = Vector::Zero(n - 1);
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(size - i));
    std::swap(order[i], order[j]);
    double amplitude = 0.0;
    if (law == AmplitudeLaw::kRademacher) {
      amplitude = rng.sign();
    } else {
      do amplitude = rng.gaussian(); while (amplitude == 0.0);
    }
    jumps[static_cast<Index>(order[i])] = amplitude;
  }
  Vector x(n);
  x[0] = 0.0;
  for (Index i = 1; i < n; ++i) x[i] = x[i - 1] + jumps[i - 1];
  return x;
}

Matrix random_gaussian_matrix(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("matrix dimensions must be positive");
  Rng rng(seed);
  Matrix A(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) A(i, j) = rng.gaussian();
  }
  return A;
}

EmpiricalCell run_cell(Index n, Index m, Index k, int trials, std::uint64_t seed,
                       const CellOptions& options, CellDiagnostics* diagnostics) {
  if (trials < 1) throw std::invalid_argument("run_cell needs trials >= 1");
  if (m < 1) throw std::invalid_argument("run_cell needs m >= 1");
  if (n < 2 || k < 0 || k > n - 1) throw std::invalid_argument("run_cell: invalid (n, k)");

  std::vector<int> success(static_cast<std::size_t>(trials), 0);
  std::vector<int> converged(static_cast<std::size_t>(trials), 0);
  std::vector<double> errors(static_cast<std::size_t>(trials), 0.0);
  parallel_for(success.size(), [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const Vector x_star =
        random_sparse_gradient_signal(n, k, derive_seed(trial_seed, Stream::kSignal, 0), options.amplitude);
    const Matrix A = random_gaussian_matrix(m, n, derive_seed(trial_seed, Stream::kMatrix, 0));
    const Vector y = A * x_star;
    const SolveReport report = solve_tv_equality(A, y, options.solve);
    const double x_norm = x_star.norm();
    // The all-zero signal (k = 0) is judged on absolute error.
    errors[t] = x_norm > 0.0 ? relative_error(report.x_hat, x_star) : report.x_hat.norm();
    converged[t] = report.converged ? 1 : 0;
    success[t] = report.converged && errors[t] <= options.threshold ? 1 : 0;
  });

  EmpiricalCell cell{n, m, k, trials, 0, seed};
  cell.successes = std::accumulate(success.begin(), success.end(), 0);
  if (diagnostics != nullptr) {
    diagnostics->nonconverged = trials - std::accumulate(converged.begin(), converged.end(), 0);
    diagnostics->relative_errors = std::move(errors);
  }
  return cell;
}

std::uint64_t cell_seed(std::uint64_t seed, Index k, Index m) {
  return derive_seed(derive_seed(seed, static_cast<std::uint64_t>(k)), static_cast<std::uint64_t>(m));
}

Index measurement_count(Index n, double delta) {
  return std::max<Index>(1, static_cast<Index>(std::llround(delta * static_cast<double>(n))));
}

namespace {

// First crossing of `level` by a nondecreasing curve, linearly interpolated.
// Returns the grid end and sets `inside` false when the level is not crossed.
double crossing(const std::vector<double>& deltas, const std::vector<double>& rates, double level,
                bool& inside) {
  inside = false;
  if (rates.front() >= level) return deltas.front();
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (rates[i] >= level) {
      inside = true;
      const double t = (level - rates[i - 1]) / (rates[i] - rates[i - 1]);
      return deltas[i - 1] + t * (deltas[i] - deltas[i - 1]);
    }
  }
  return deltas.back();
}

}  // namespace

TransitionEstimate transition_from_cells(double epsilon, std::vector<EmpiricalCell> cells) {
  if (cells.empty()) throw std::invalid_argument("transition estimate needs at least one cell");
  std::sort(cells.begin(), cells.end(),
            [](const EmpiricalCell& a, const EmpiricalCell& b) { return a.m < b.m; });
  for (const EmpiricalCell& c : cells) {
    if (c.n != cells.front().n || c.k != cells.front().k) {
      throw std::invalid_argument("transition cells must share n and k");
    }
    if (c.trials < 1 || c.successes < 0 || c.successes > c.trials) {
      throw std::invalid_argument("transition cell has inconsistent counts");
    }
  }

  TransitionEstimate est;
  est.epsilon = epsilon;
  est.trials_per_cell = cells.front().trials;
  std::vector<double> weights;
  for (const EmpiricalCell& c : cells) {
    est.deltas.push_back(static_cast<double>(c.m) / static_cast<double>(c.n));
    est.raw_rates.push_back(c.rate());
    weights.push_back(static_cast<double>(c.trials));
  }
  est.fitted_rates = isotonic_increasing(est.raw_rates, weights);
  bool inside10 = false;
  bool inside90 = false;
  est.delta_10 = crossing(est.deltas, est.fitted_rates, 0.1, inside10);
  est.delta_50 = crossing(est.deltas, est.fitted_rates, 0.5, est.bracketed);
  est.delta_90 = crossing(est.deltas, est.fitted_rates, 0.9, inside90);
  est.cells = std::move(cells);
  return est;
}

TransitionEstimate empirical_transition(Index n, double epsilon, const std::vector<double>& delta_grid,
                                        int trials, std::uint64_t seed, const CellOptions& options) {
  if (delta_grid.empty()) throw std::invalid_argument("delta grid is empty");
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (!(delta_grid[i] > 0.0 && delta_grid[i] <= 1.0)) {
      throw std::invalid_argument("delta values must lie in (0, 1]");
    }
    if (i > 0 && !(delta_grid[i] > delta_grid[i - 1])) {
      throw std::invalid_argument("delta grid must be strictly increasing");
    }
  }
  const Index k = gradient_count(n, epsilon);
  std::vector<EmpiricalCell> cells;
  Index previous_m = 0;
  for (const double delta : delta_grid) {
    const Index m = measurement_count(n, delta);
    if (m == previous_m) continue;
    previous_m = m;
    cells.push_back(run_cell(n, m, k, trials, cell_seed(seed, k, m), options));
  }
  return transition_from_cells(epsilon, std::move(cells));
}

std::vector<ComparisonRow> compare_report(const std::vector<CurvePoint>& predicted,
                                          const std::vector<TransitionEstimate>& empirical,
                                          double tolerance) {
  if (predicted.empty() || empirical.empty()) throw std::invalid_argument("comparison grid is empty");
  if (predicted.size() != empirical.size()) throw std::invalid_argument("epsilon grids differ in size");
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const CurvePoint& p = predicted[i];
    const TransitionEstimate& e = empirical[i];
    if (std::abs(p.epsilon - e.epsilon) > 1e-9) {
      throw std::invalid_argument("epsilon grids do not match at position " + std::to_string(i));
    }
    ComparisonRow row;
    row.epsilon = p.epsilon;
    row.delta_pred = p.delta_pred;
    row.pred_stderr = p.std_error;
    row.delta_50 = e.delta_50;
    row.delta_10 = e.delta_10;
    row.delta_90 = e.delta_90;
    row.abs_diff = std::abs(p.delta_pred - e.delta_50);
    row.combined_uncertainty = p.std_error + 0.5 * (e.delta_90 - e.delta_10);
    row.pass = e.bracketed && row.abs_diff <= tolerance;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tvpt
