#include "tvpt/solver.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvpt/diffop.hpp"
#include "tvpt/random.hpp"

namespace tvpt {
namespace {

void validate(const Matrix& A, const Vector& y, const SolveOptions& options) {
  if (A.rows() < 1) throw std::invalid_argument("solve_tv_equality: need at least one measurement");
  if (A.cols() < 2) throw std::invalid_argument("solve_tv_equality: need n >= 2");
  if (y.size() != A.rows()) throw std::invalid_argument("solve_tv_equality: y has the wrong length");
  if (!A.allFinite() || !y.allFinite()) throw std::invalid_argument("solve_tv_equality: non-finite input");
  if (!(options.feas_tol > 0.0) || !(options.step_tol > 0.0)) {
    throw std::invalid_argument("solve_tv_equality: tolerances must be positive");
  }
  if (options.max_iter < 1 || options.power_iterations < 1) {
    throw std::invalid_argument("solve_tv_equality: iteration counts must be positive");
  }
  if (!(options.norm_padding >= 1.0) || !(options.primal_weight > 0.0)) {
    throw std::invalid_argument("solve_tv_equality: invalid step-size parameters");
  }
}

// Power iteration for the largest singular value of the operator whose normal
// map is `normal` (x -> K^T K x). Deterministic start vector.
template <typename Normal>
double operator_norm(Index n, int iterations, Normal&& normal) {
  Rng rng(0x5eed);
  Vector x = rng.gaussian_vector(n);
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector y = normal(x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    const double next = std::sqrt(norm);
    x = y / norm;
    if (std::abs(next - estimate) <= 1e-10 * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate;
}

// The dual iterate must settle too; otherwise the first step from a feasible
// start with p = 0 would already look stationary.
double relative_change(const Vector& next, const Vector& previous) {
  return (next - previous).norm() / std::max(1.0, next.norm());
}

double feasibility(const Vector& ax, const Vector& y) {
  return (ax - y).norm() / std::max(1.0, y.norm());
}

// Chambolle-Pock with dual variables p (for Bx, kept in [-1, 1]) and q (for
// the scaled constraint A_s x = y_s). A is rescaled to operator norm about 2
// so both blocks see comparable step sizes; the constraint set is unchanged.
SolveReport solve_dual_block(const Matrix& A, const Vector& y, const SolveOptions& options) {
  const Index n = A.cols();
  const DifferenceOperator B(n);
  const double a_norm = operator_norm(n, options.power_iterations,
                                      [&](const Vector& x) -> Vector { return A.transpose() * (A * x); });
  const double scale = a_norm > 0.0 ? 2.0 / a_norm : 1.0;
  const Matrix As = A * scale;
  const Vector ys = y * scale;
  const double k_norm =
      operator_norm(n, options.power_iterations, [&](const Vector& x) -> Vector {
        return B.adjoint(B.apply(x)) + As.transpose() * (As * x);
      }) * options.norm_padding;
  const double tau = options.primal_weight / k_norm;
  const double sigma = 1.0 / (options.primal_weight * k_norm);

  Vector x = Vector::Zero(n);
  Vector p = Vector::Zero(n - 1);
  Vector q = Vector::Zero(A.rows());
  Vector ax = Vector::Zero(A.rows());
  SolveReport report;
  report.operator_norm = k_norm;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Vector x_next = x - tau * (B.adjoint(p) + As.transpose() * q);
    const Vector ax_next = As * x_next;
    const Vector x_bar = 2.0 * x_next - x;
    const Vector p_next = (p + sigma * B.apply(x_bar)).cwiseMax(-1.0).cwiseMin(1.0);
    q += sigma * (2.0 * ax_next - ax - ys);

    const double change = std::max((x_next - x).norm() / std::max(1.0, x_next.norm()),
                                    relative_change(p_next, p));
    p = p_next;
    x = x_next;
    ax = ax_next;
    report.iterations = it;
    if (change <= options.step_tol && feasibility(A * x, y) <= options.feas_tol) {
      report.converged = true;
      break;
    }
  }
  report.x_hat = x;
  report.feas_residual = feasibility(A * x, y);
  report.objective = tv_seminorm(x);
  return report;
}

// Chambolle-Pock on min ||Bx||_1 + indicator{Ax = y}: the primal resolvent is
// the orthogonal projection x -> x - V V^T x + x_p, with V an orthonormal
// basis of range(A^T) and x_p the minimum-norm least-squares solution.
SolveReport solve_projection(const Matrix& A, const Vector& y, const SolveOptions& options) {
  const Index n = A.cols();
  const DifferenceOperator B(n);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index rank = svd.rank();
  const Eigen::MatrixXd V = svd.matrixV().leftCols(rank);
  const Vector x_p = svd.solve(y);

  auto project = [&](const Vector& z) -> Vector { return z - V * (V.transpose() * z) + x_p; };

  const double k_norm =
      operator_norm(n, options.power_iterations,
                    [&](const Vector& x) -> Vector { return B.adjoint(B.apply(x)); }) *
      options.norm_padding;
  const double tau = options.primal_weight / k_norm;
  const double sigma = 1.0 / (options.primal_weight * k_norm);

  SolveReport report;
  report.operator_norm = k_norm;
  const double feas = feasibility(A * x_p, y);
  Vector x = x_p;
  Vector p = Vector::Zero(n - 1);
  for (int it = 1; it <= options.max_iter; ++it) {
    const Vector x_next = project(x - tau * B.adjoint(p));
    const Vector p_next = (p + sigma * B.apply(2.0 * x_next - x)).cwiseMax(-1.0).cwiseMin(1.0);
    const double change = std::max((x_next - x).norm() / std::max(1.0, x_next.norm()),
                                   relative_change(p_next, p));
    p = p_next;
    x = x_next;
    report.iterations = it;
    if (change <= options.step_tol && feas <= options.feas_tol) {
      report.converged = true;
      break;
    }
  }
  report.x_hat = x;
  report.feas_residual = feasibility(A * x, y);
  report.converged = report.converged && report.feas_residual <= options.feas_tol;
  report.objective = tv_seminorm(x);
  return report;
}

}  // namespace

SolveReport solve_tv_equality(const Matrix& A, const Vector& y, const SolveOptions& options) {
  validate(A, y, options);
  return options.mode == ConstraintMode::kDualBlock ? solve_dual_block(A, y, options)
                                                    : solve_projection(A, y, options);
}

double relative_error(const Vector& x_hat, const Vector& x_star) {
  if (x_hat.size() != x_star.size()) throw std::invalid_argument("relative_error: length mismatch");
  const double norm = x_star.norm();
  if (norm == 0.0) throw std::invalid_argument("relative_error: reference signal is zero");
  return (x_hat - x_star).norm() / norm;
}

bool recovery_success(const Vector& x_hat, const Vector& x_star, double threshold) {
  return relative_error(x_hat, x_star) <= threshold;
}

}  // namespace tvpt
