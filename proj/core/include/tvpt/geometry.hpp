#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tvpt/common.hpp"
#include "tvpt/gradient_pattern.hpp"

namespace tvpt {

enum class InnerSolver {
  /// Blockwise exact solve through 1-D TV denoising, polished by projected
  /// gradient if the optimality check fails.
  kExact,
  /// Projected gradient with constant step 1/(4 lambda^2).
  kProjectedGradient,
};

struct DistanceOptions {
  InnerSolver solver = InnerSolver::kExact;
  /// Tolerance on the projected-gradient step ||v - P(v - grad/L)||_inf, L = 4 lambda^2.
  double tol = 1e-9;
  int max_iter = 100000;
  /// Outer search over lambda.
  double lambda_tol = 1e-6;
  double lambda_cap = 1e6;
  double lambda_start = 1.0;
};

/// Squared distance from g to lambda * subdiff(||B.||_1)(x), where the
/// subdifferential is {B^T v : v in V} and V is fixed by the pattern.
struct DistanceResult {
  double value = 0.0;
  /// Element of V attaining the distance (length n-1).
  Vector minimizer_v;
  double lambda = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  /// Inner solver stopped at max_iter without meeting tol.
  bool iteration_cap_hit = false;
  /// The cone search reached lambda_cap without the objective turning up.
  bool lambda_capped = false;
};

DistanceResult dist_sq_scaled_subdiff(const Vector& g, double lambda, const GradientPattern& pattern,
                                      const DistanceOptions& options = {});

/// Squared distance from g to cone(subdiff), minimising the scaled distance
/// over lambda >= 0 by golden-section search on an expanding bracket. The
/// scaled distance is convex in lambda, so the 1-D search is exact up to
/// lambda_tol.
DistanceResult dist_sq_cone(const Vector& g, const GradientPattern& pattern,
                            const DistanceOptions& options = {});

/// Monte Carlo estimate of a mean squared distance.
struct DimensionEstimate {
  double mean = 0.0;
  /// Sample standard deviation / sqrt(samples).
  double std_error = 0.0;
  int samples = 0;
  std::optional<double> lambda_star;
  bool lambda_capped = false;
};

/// Standard Gaussian sample `index` of a run seeded with `seed`. Every Monte
/// Carlo routine draws its vectors through this function, so estimates that
/// share a seed share their samples.
Vector gaussian_sample(Index n, std::uint64_t seed, std::uint64_t index);

/// E dist^2(g, lambda * subdiff) over g ~ N(0, I).
DimensionEstimate estimate_expected_dist(const GradientPattern& pattern, double lambda, int samples,
                                         std::uint64_t seed, const DistanceOptions& options = {});

/// min over lambda of the sample average of dist^2(g_j, lambda * subdiff),
/// with the g_j held fixed across lambda (common random numbers).
DimensionEstimate minimize_expected_dist(const GradientPattern& pattern, int samples,
                                         std::uint64_t seed, const DistanceOptions& options = {});

/// E dist^2(g, cone(subdiff)); lambda is optimised per sample.
DimensionEstimate estimate_cone_dim(const GradientPattern& pattern, int samples, std::uint64_t seed,
                                    const DistanceOptions& options = {});

struct SandwichReport {
  Index n = 0;
  Index k = 0;
  int samples = 0;
  double min_scaled = 0.0;
  double min_scaled_std_error = 0.0;
  double lambda_star = 0.0;
  double cone = 0.0;
  double cone_std_error = 0.0;
  /// min_scaled - cone, and the standard error of the paired per-sample gap.
  double difference = 0.0;
  double difference_std_error = 0.0;
  bool lambda_capped = false;
  /// -3 sigma <= difference <= 6 + 3 sigma.
  bool pass = false;
};

inline constexpr double kSandwichGap = 6.0;

SandwichReport sandwich_check(const GradientPattern& pattern, int samples, std::uint64_t seed,
                              const DistanceOptions& options = {});

struct CurvePoint {
  double epsilon = 0.0;
  double delta_pred = 0.0;
  double std_error = 0.0;
  double lambda_star = 0.0;
  int samples = 0;
  Index n = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct CurveOptions {
  int patterns_per_eps = 5;
  DistanceOptions distance;
};

/// Number of nonzero gradients used for sparsity fraction epsilon:
/// round(epsilon * (n - 1)).
Index gradient_count(Index n, double epsilon);

/// Predicted transition delta(eps) = min_lambda D(lambda subdiff) / n, averaged
/// over random sign/position patterns with k = gradient_count(n, eps).
std::vector<CurvePoint> predicted_curve(Index n, const std::vector<double>& epsilon_grid, int samples,
                                        std::uint64_t seed, const CurveOptions& options = {});

}  // namespace tvpt
