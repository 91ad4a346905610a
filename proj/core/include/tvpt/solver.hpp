#pragma once

#include "tvpt/common.hpp"

namespace tvpt {

/// How the measurement constraint Ax = y enters the primal-dual iteration.
enum class ConstraintMode {
  /// Second dual block with an affine-shift resolvent; feasibility is reached
  /// asymptotically.
  kDualBlock,
  /// The primal step projects onto {x : Ax = y}; B is the only dual block.
  kProjection,
};

struct SolveOptions {
  ConstraintMode mode = ConstraintMode::kProjection;
  /// ||Ax - y|| / max(1, ||y||).
  double feas_tol = 1e-6;
  /// ||x_k - x_{k-1}|| / max(1, ||x_k||).
  double step_tol = 1e-8;
  int max_iter = 200000;
  /// Multiplier applied to the power-iteration estimate of the operator norm.
  double norm_padding = 1.05;
  int power_iterations = 200;
  /// tau = primal_weight / L, sigma = 1 / (primal_weight * L).
  double primal_weight = 0.1;
};

struct SolveReport {
  Vector x_hat;
  double feas_residual = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Operator norm estimate used for the step sizes (after padding).
  double operator_norm = 0.0;
};

/// min ||Bx||_1 subject to Ax = y by a first-order primal-dual (Chambolle-Pock)
/// iteration. Throws std::invalid_argument on malformed input; a run that
/// stops at max_iter comes back with converged == false.
SolveReport solve_tv_equality(const Matrix& A, const Vector& y, const SolveOptions& options = {});

inline constexpr double kDefaultSuccessThreshold = 1e-3;

/// ||x_hat - x_star|| / ||x_star||. Throws if x_star is zero.
double relative_error(const Vector& x_hat, const Vector& x_star);

bool recovery_success(const Vector& x_hat, const Vector& x_star,
                      double threshold = kDefaultSuccessThreshold);

}  // namespace tvpt
