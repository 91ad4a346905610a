#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the solvers it is meant to check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tvpt/common.hpp"
#include "tvpt/gradient_pattern.hpp"

namespace tvpt::oracle {

inline Eigen::MatrixXd dense_difference(Index n) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n - 1, n);
  for (Index i = 0; i + 1 < n; ++i) {
    B(i, i) = 1.0;
    B(i, i + 1) = -1.0;
  }
  return B;
}

inline Eigen::MatrixXd dense_h(Index l) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(l, l);
  for (Index i = 0; i < l; ++i) {
    H(i, i) = 2.0;
    if (i + 1 < l) H(i, i + 1) = H(i + 1, i) = -1.0;
  }
  return H;
}

/// v0 built by linear interpolation across every flat group between the
/// neighbouring fixed signs, with value 0 at the virtual positions -1 and n-1.
inline Vector interpolation_v0(const GradientPattern& p) {
  const Index size = p.gradient_size();
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = p.sign(i);
  for (const FlatGroup& g : p.groups()) {
    const Index left = g.begin - 1;
    const Index right = g.end + 1;
    const double a = left >= 0 ? p.sign(left) : 0.0;
    const double b = right < size ? p.sign(right) : 0.0;
    for (Index i = g.begin; i <= g.end; ++i) {
      const double t = static_cast<double>(i - left) / static_cast<double>(right - left);
      v[i] = a + t * (b - a);
    }
  }
  return v;
}

/// ||g - lambda B^T v||^2 by explicit dense algebra.
inline double scaled_objective(const Vector& g, double lambda, const Vector& v) {
  const Eigen::MatrixXd B = dense_difference(g.size());
  return (g - lambda * B.transpose() * v).squaredNorm();
}

/// Brute-force min over v in V of ||g - lambda B^T v||^2: a grid of spacing
/// `step` over all flat coordinates but the last one, whose optimal value
/// given the others is a clipped scalar quadratic minimiser.
inline double grid_scaled(const Vector& g, double lambda, const GradientPattern& p, double step = 1e-3) {
  const Index n = g.size();
  std::vector<Index> flat;
  for (Index i = 0; i < p.gradient_size(); ++i) {
    if (p.is_flat(i)) flat.push_back(i);
  }
  Vector v(p.gradient_size());
  for (Index i = 0; i < v.size(); ++i) v[i] = p.sign(i);
  if (flat.empty() || lambda == 0.0) return scaled_objective(g, lambda, v);

  const auto points = static_cast<Index>(std::llround(2.0 / step)) + 1;
  const auto grid_dims = static_cast<int>(flat.size()) - 1;
  std::vector<Index> counter(static_cast<std::size_t>(grid_dims), 0);
  const Index last = flat.back();
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (int d = 0; d < grid_dims; ++d) v[flat[static_cast<std::size_t>(d)]] = -1.0 + step * static_cast<double>(counter[static_cast<std::size_t>(d)]);
    v[last] = 0.0;
    // u = g - lambda B^T v with v_last = 0.
    Vector u = g;
    u[0] -= lambda * v[0];
    for (Index i = 1; i + 1 < n; ++i) u[i] -= lambda * (v[i] - v[i - 1]);
    u[n - 1] += lambda * v[n - 2];
    v[last] = std::clamp((u[last] - u[last + 1]) / (2.0 * lambda), -1.0, 1.0);
    u[last] -= lambda * v[last];
    u[last + 1] += lambda * v[last];
    best = std::min(best, u.squaredNorm());

    int d = 0;
    while (d < grid_dims && ++counter[static_cast<std::size_t>(d)] == points) counter[static_cast<std::size_t>(d++)] = 0;
    if (d == grid_dims) break;
  }
  return best;
}

/// Squared distance from g to the cone generated by {B^T v : v a vertex of V},
/// which equals cone(subdifferential) because V is a box. Enumerates every
/// linearly independent subset of generators and keeps the best projection
/// with nonnegative coefficients (exact for small |S|).
inline double generator_cone(const Vector& g, const GradientPattern& p) {
  const Index n = g.size();
  const Eigen::MatrixXd B = dense_difference(n);
  std::vector<Index> flat;
  for (Index i = 0; i < p.gradient_size(); ++i) {
    if (p.is_flat(i)) flat.push_back(i);
  }
  const std::size_t vertices = std::size_t{1} << flat.size();
  Eigen::MatrixXd gens(n, static_cast<Index>(vertices));
  for (std::size_t mask = 0; mask < vertices; ++mask) {
    Vector v(p.gradient_size());
    for (Index i = 0; i < v.size(); ++i) v[i] = p.sign(i);
    for (std::size_t b = 0; b < flat.size(); ++b) v[flat[b]] = (mask >> b) & 1U ? 1.0 : -1.0;
    gens.col(static_cast<Index>(mask)) = B.transpose() * v;
  }
  double best = g.squaredNorm();
  const std::size_t subsets = std::size_t{1} << vertices;
  for (std::size_t s = 1; s < subsets; ++s) {
    std::vector<Index> cols;
    for (std::size_t b = 0; b < vertices; ++b) {
      if ((s >> b) & 1U) cols.push_back(static_cast<Index>(b));
    }
    if (static_cast<Index>(cols.size()) > n) continue;
    Eigen::MatrixXd G(n, static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) G.col(static_cast<Index>(c)) = gens.col(cols[c]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
    if (qr.rank() < G.cols()) continue;
    const Vector coef = qr.solve(g);
    if ((coef.array() < -1e-12).any()) continue;
    best = std::min(best, (g - G * coef).squaredNorm());
  }
  return best;
}

/// Brute-force grid over lambda in [0, lambda_max] (spacing `lambda_step`) of
/// grid_scaled. Intended for patterns with at most one flat coordinate.
inline double grid_cone(const Vector& g, const GradientPattern& p, double lambda_max, double lambda_step = 1e-3) {
  double best = g.squaredNorm();
  const auto steps = static_cast<Index>(std::llround(lambda_max / lambda_step));
  for (Index s = 1; s <= steps; ++s) {
    best = std::min(best, grid_scaled(g, lambda_step * static_cast<double>(s), p));
  }
  return best;
}

/// Dense two-phase simplex (Bland's rule) for min c^T z s.t. A z = b, z >= 0.
/// Returns the optimal value, or nothing when infeasible or unbounded.
inline std::optional<double> simplex_standard_form(Eigen::MatrixXd A, Vector b, const Vector& c) {
  const Index rows = A.rows();
  const Index vars = A.cols();
  for (Index i = 0; i < rows; ++i) {
    if (b[i] < 0.0) {
      A.row(i) *= -1.0;
      b[i] = -b[i];
    }
  }
  // Tableau columns: original variables, artificials, right-hand side.
  const Index width = vars + rows + 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(rows + 1, width);
  T.topLeftCorner(rows, vars) = A;
  T.block(0, vars, rows, rows).setIdentity();
  T.col(width - 1).head(rows) = b;
  std::vector<Index> basis(static_cast<std::size_t>(rows));
  for (Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = vars + i;
  constexpr double kEps = 1e-9;

  auto pivot = [&](Index r, Index col) {
    T.row(r) /= T(r, col);
    for (Index i = 0; i <= rows; ++i) {
      if (i != r && T(i, col) != 0.0) T.row(i) -= T(i, col) * T.row(r);
    }
    basis[static_cast<std::size_t>(r)] = col;
  };
  // Runs simplex on the objective row `rows` over columns [0, allowed).
  auto run = [&](Index allowed) -> bool {
    for (int guard = 0; guard < 100000; ++guard) {
      Index enter = -1;
      for (Index j = 0; j < allowed; ++j) {
        if (T(rows, j) < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows; ++i) {
        if (T(i, enter) > kEps) {
          const double r = T(i, width - 1) / T(i, enter);
          if (r < ratio - 1e-12 || (std::abs(r - ratio) <= 1e-12 && leave >= 0 &&
                                    basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            ratio = r;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return false;
  };

  // Phase 1: minimise the sum of artificials.
  for (Index i = 0; i < rows; ++i) T.row(rows) -= T.row(i);
  for (Index i = 0; i < rows; ++i) T(rows, vars + i) = 0.0;
  if (!run(vars)) return std::nullopt;
  if (-T(rows, width - 1) > 1e-7) return std::nullopt;
  for (Index i = 0; i < rows; ++i) {
    if (basis[static_cast<std::size_t>(i)] < vars) continue;
    for (Index j = 0; j < vars; ++j) {
      if (std::abs(T(i, j)) > kEps) {
        pivot(i, j);
        break;
      }
    }
  }

  // Phase 2: rebuild the reduced costs for c; artificials stay out.
  T.row(rows).setZero();
  T.row(rows).head(vars) = c.transpose();
  for (Index i = 0; i < rows; ++i) {
    const Index bcol = basis[static_cast<std::size_t>(i)];
    if (bcol < vars && c[bcol] != 0.0) T.row(rows) -= c[bcol] * T.row(i);
  }
  if (!run(vars)) return std::nullopt;
  return -T(rows, width - 1);
}

/// min ||Bx||_1 s.t. Ax = y as a linear program: x = x+ - x-, Bx = p - q,
/// minimise sum(p + q) with all parts nonnegative.
inline std::optional<double> tv_linear_program(const Eigen::MatrixXd& A, const Vector& y) {
  const Index m = A.rows();
  const Index n = A.cols();
  const Eigen::MatrixXd B = dense_difference(n);
  const Index vars = 2 * n + 2 * (n - 1);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(m + n - 1, vars);
  E.block(0, 0, m, n) = A;
  E.block(0, n, m, n) = -A;
  E.block(m, 0, n - 1, n) = B;
  E.block(m, n, n - 1, n) = -B;
  E.block(m, 2 * n, n - 1, n - 1) = -Eigen::MatrixXd::Identity(n - 1, n - 1);
  E.block(m, 3 * n - 1, n - 1, n - 1) = Eigen::MatrixXd::Identity(n - 1, n - 1);
  Vector rhs = Vector::Zero(m + n - 1);
  rhs.head(m) = y;
  Vector c = Vector::Zero(vars);
  c.tail(2 * (n - 1)).setOnes();
  return simplex_standard_form(E, rhs, c);
}

}  // namespace tvpt::oracle
