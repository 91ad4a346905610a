#include "tvpt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tvpt/diffop.hpp"
#include "tvpt/parallel.hpp"
#include "tvpt/pattern.hpp"
#include "tvpt/random.hpp"
#include "tvpt/tv_block.hpp"

namespace tvpt {
namespace {

void validate_options(const DistanceOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("distance tolerance must be positive");
  if (!(options.lambda_tol > 0.0)) throw std::invalid_argument("lambda tolerance must be positive");
  if (!(options.lambda_cap > 0.0)) throw std::invalid_argument("lambda cap must be positive");
  if (!(options.lambda_start > 0.0)) throw std::invalid_argument("lambda start must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
}

// u = g - lambda B^T v.
void residual(const Vector& g, double lambda, const Vector& v, Vector& u) {
  const Index n = g.size();
  u = g;
  u[0] -= lambda * v[0];
  for (Index i = 1; i + 1 < n; ++i) u[i] -= lambda * (v[i] - v[i - 1]);
  u[n - 1] += lambda * v[n - 2];
}

// One projected-gradient step with step 1/(4 lambda^2), applied to the flat
// coordinates. Returns the max coordinate change, which is the optimality
// measure reported as kkt_residual.
double projected_step(const GradientPattern& pattern, double lambda, const Vector& u, Vector& v,
                      bool apply) {
  double change = 0.0;
  const double scale = 1.0 / (DifferenceOperator::kGramNormBound * lambda);
  for (const FlatGroup& group : pattern.groups()) {
    for (Index j = group.begin; j <= group.end; ++j) {
      const double next = std::clamp(v[j] + scale * (u[j] - u[j + 1]), -1.0, 1.0);
      change = std::max(change, std::abs(next - v[j]));
      if (apply) v[j] = next;
    }
  }
  return change;
}

struct Workspace {
  Vector u;
  Vector scratch;
};

DistanceResult solve_scaled(const Vector& g, double lambda, const GradientPattern& pattern,
                            const DistanceOptions& options, const Vector* warm, Workspace& ws) {
  DistanceResult result;
  result.lambda = lambda;
  result.minimizer_v = pattern.fixed_part();
  Vector& v = result.minimizer_v;
  if (lambda == 0.0 || pattern.flat_count() == 0) {
    residual(g, lambda, v, ws.u);
    result.value = ws.u.squaredNorm();
    return result;
  }

  bool polish = options.solver == InnerSolver::kProjectedGradient;
  if (polish) {
    if (warm != nullptr) {
      for (const FlatGroup& group : pattern.groups()) {
        v.segment(group.begin, group.length()) = warm->segment(group.begin, group.length());
      }
    }
  } else {
    residual(g, lambda, v, ws.u);
    ws.scratch.resize(g.size());
    for (const FlatGroup& group : pattern.groups()) {
      const auto l = static_cast<std::size_t>(group.length());
      solve_block_dual(std::span<const double>(ws.u.data() + group.begin, l + 1), lambda,
                       std::span<double>(v.data() + group.begin, l),
                       std::span<double>(ws.scratch.data(), l + 1));
    }
    residual(g, lambda, v, ws.u);
    result.kkt_residual = projected_step(pattern, lambda, ws.u, v, false);
    result.iterations = 1;
    polish = result.kkt_residual > options.tol;
  }

  if (polish) {
    int it = 0;
    for (; it < options.max_iter; ++it) {
      residual(g, lambda, v, ws.u);
      result.kkt_residual = projected_step(pattern, lambda, ws.u, v, false);
      if (result.kkt_residual <= options.tol) break;
      projected_step(pattern, lambda, ws.u, v, true);
    }
    result.iterations += it;
    result.iteration_cap_hit = it == options.max_iter;
  }
  residual(g, lambda, v, ws.u);
  result.value = ws.u.squaredNorm();
  return result;
}

struct ScalarMinimum {
  double x = 0.0;
  double f = 0.0;
  bool capped = false;
};

// Minimises a convex function on [0, inf): doubles the right end of the
// bracket until the function turns up (or the cap is reached), then runs
// golden-section search inside the last three probe points.
template <typename Fn>
ScalarMinimum minimize_convex(Fn&& f, const DistanceOptions& options) {
  const double f0 = f(0.0);
  ScalarMinimum best{0.0, f0, false};
  auto consider = [&best](double x, double fx) {
    if (fx < best.f) best = {x, fx, false};
  };

  double lo = 0.0;
  double hi = std::min(options.lambda_start, options.lambda_cap);
  double f_hi = f(hi);
  consider(hi, f_hi);
  if (f_hi <= f0) {
    double prev = 0.0;
    double cur = hi;
    double f_cur = f_hi;
    for (;;) {
      if (cur >= options.lambda_cap) {
        return {cur, f_cur, true};
      }
      const double next = std::min(2.0 * cur, options.lambda_cap);
      const double f_next = f(next);
      consider(next, f_next);
      if (f_next > f_cur) {
        lo = prev;
        hi = next;
        break;
      }
      prev = cur;
      cur = next;
      f_cur = f_next;
    }
  }

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  consider(c, fc);
  consider(d, fd);
  while (b - a > options.lambda_tol * std::max(1.0, 0.5 * (a + b))) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      consider(d, fd);
    }
  }
  return best;
}

void validate_input(const Vector& g, const GradientPattern& pattern) {
  if (g.size() != pattern.n()) throw std::invalid_argument("g must have length n");
  if (!g.allFinite()) throw std::invalid_argument("g has non-finite entries");
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanAndError summarize(const std::vector<double>& values) {
  const auto count = static_cast<double>(values.size());
  MeanAndError out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  double ss = 0.0;
  for (const double x : values) ss += (x - out.mean) * (x - out.mean);
  out.std_error = values.size() > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
  return out;
}

std::vector<Vector> gaussian_samples(Index n, int samples, std::uint64_t seed) {
  std::vector<Vector> out(static_cast<std::size_t>(samples));
  parallel_for(out.size(), [&](std::size_t j) { out[j] = gaussian_sample(n, seed, j); });
  return out;
}

void require_samples(int samples) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo estimates need samples >= 2");
}

// Per-sample scaled distances at one lambda.
std::vector<double> scaled_values(const std::vector<Vector>& gs, double lambda,
                                  const GradientPattern& pattern, const DistanceOptions& options) {
  std::vector<double> values(gs.size());
  parallel_for(gs.size(), [&](std::size_t j) {
    Workspace ws;
    values[j] = solve_scaled(gs[j], lambda, pattern, options, nullptr, ws).value;
  });
  return values;
}

struct ScaledMinimum {
  double lambda = 0.0;
  bool capped = false;
  std::vector<double> values;
};

ScaledMinimum minimize_scaled(const std::vector<Vector>& gs, const GradientPattern& pattern,
                              const DistanceOptions& options) {
  auto average = [&](double lambda) {
    const std::vector<double> values = scaled_values(gs, lambda, pattern, options);
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  };
  const ScalarMinimum best = minimize_convex(average, options);
  return {best.x, best.capped, scaled_values(gs, best.x, pattern, options)};
}

std::vector<DistanceResult> cone_results(const std::vector<Vector>& gs, const GradientPattern& pattern,
                                         const DistanceOptions& options) {
  std::vector<DistanceResult> results(gs.size());
  parallel_for(gs.size(), [&](std::size_t j) { results[j] = dist_sq_cone(gs[j], pattern, options); });
  return results;
}

}  // namespace

DistanceResult dist_sq_scaled_subdiff(const Vector& g, double lambda, const GradientPattern& pattern,
                                      const DistanceOptions& options) {
  validate_options(options);
  validate_input(g, pattern);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  Workspace ws;
  return solve_scaled(g, lambda, pattern, options, nullptr, ws);
}

DistanceResult dist_sq_cone(const Vector& g, const GradientPattern& pattern,
                            const DistanceOptions& options) {
  validate_options(options);
  validate_input(g, pattern);
  Workspace ws;
  Vector warm = pattern.fixed_part();
  auto objective = [&](double lambda) {
    DistanceResult r = solve_scaled(g, lambda, pattern, options, &warm, ws);
    if (lambda > 0.0) warm = r.minimizer_v;
    return r.value;
  };
  const ScalarMinimum best = minimize_convex(objective, options);
  DistanceResult result = solve_scaled(g, best.x, pattern, options, &warm, ws);
  result.lambda_capped = best.capped;
  return result;
}

Vector gaussian_sample(Index n, std::uint64_t seed, std::uint64_t index) {
  Rng rng(derive_seed(seed, Stream::kGaussian, index));
  return rng.gaussian_vector(n);
}

DimensionEstimate estimate_expected_dist(const GradientPattern& pattern, double lambda, int samples,
                                         std::uint64_t seed, const DistanceOptions& options) {
  require_samples(samples);
  validate_options(options);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  const std::vector<Vector> gs = gaussian_samples(pattern.n(), samples, seed);
  const MeanAndError summary = summarize(scaled_values(gs, lambda, pattern, options));
  return {summary.mean, summary.std_error, samples, lambda, false};
}

DimensionEstimate minimize_expected_dist(const GradientPattern& pattern, int samples,
                                         std::uint64_t seed, const DistanceOptions& options) {
  require_samples(samples);
  validate_options(options);
  const std::vector<Vector> gs = gaussian_samples(pattern.n(), samples, seed);
  const ScaledMinimum best = minimize_scaled(gs, pattern, options);
  const MeanAndError summary = summarize(best.values);
  return {summary.mean, summary.std_error, samples, best.lambda, best.capped};
}

DimensionEstimate estimate_cone_dim(const GradientPattern& pattern, int samples, std::uint64_t seed,
                                    const DistanceOptions& options) {
  require_samples(samples);
  validate_options(options);
  const std::vector<Vector> gs = gaussian_samples(pattern.n(), samples, seed);
  const std::vector<DistanceResult> results = cone_results(gs, pattern, options);
  std::vector<double> values(results.size());
  bool capped = false;
  for (std::size_t j = 0; j < results.size(); ++j) {
    values[j] = results[j].value;
    capped = capped || results[j].lambda_capped;
  }
  const MeanAndError summary = summarize(values);
  return {summary.mean, summary.std_error, samples, std::nullopt, capped};
}

SandwichReport sandwich_check(const GradientPattern& pattern, int samples, std::uint64_t seed,
                              const DistanceOptions& options) {
  require_samples(samples);
  validate_options(options);
  const std::vector<Vector> gs = gaussian_samples(pattern.n(), samples, seed);
  const ScaledMinimum scaled = minimize_scaled(gs, pattern, options);
  const std::vector<DistanceResult> cone = cone_results(gs, pattern, options);

  std::vector<double> cone_values(gs.size());
  std::vector<double> gaps(gs.size());
  for (std::size_t j = 0; j < gs.size(); ++j) {
    cone_values[j] = cone[j].value;
    gaps[j] = scaled.values[j] - cone[j].value;
  }
  const MeanAndError s = summarize(scaled.values);
  const MeanAndError c = summarize(cone_values);
  const MeanAndError d = summarize(gaps);

  SandwichReport report;
  report.n = pattern.n();
  report.k = pattern.fixed_count();
  report.samples = samples;
  report.min_scaled = s.mean;
  report.min_scaled_std_error = s.std_error;
  report.lambda_star = scaled.lambda;
  report.cone = c.mean;
  report.cone_std_error = c.std_error;
  report.difference = d.mean;
  report.difference_std_error = d.std_error;
  report.lambda_capped = scaled.capped;
  report.pass = d.mean >= -3.0 * d.std_error && d.mean <= kSandwichGap + 3.0 * d.std_error;
  return report;
}

Index gradient_count(Index n, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  return static_cast<Index>(std::llround(epsilon * static_cast<double>(n - 1)));
}

std::vector<CurvePoint> predicted_curve(Index n, const std::vector<double>& epsilon_grid, int samples,
                                        std::uint64_t seed, const CurveOptions& options) {
  if (n < 2) throw std::invalid_argument("predicted_curve needs n >= 2");
  if (options.patterns_per_eps < 1) throw std::invalid_argument("patterns_per_eps must be >= 1");
  require_samples(samples);
  for (const double eps : epsilon_grid) gradient_count(n, eps);

  const auto patterns = static_cast<std::uint64_t>(options.patterns_per_eps);
  std::vector<CurvePoint> curve;
  curve.reserve(epsilon_grid.size());
  for (std::size_t e = 0; e < epsilon_grid.size(); ++e) {
    const double eps = epsilon_grid[e];
    const Index k = gradient_count(n, eps);
    std::vector<double> deltas;
    std::vector<double> lambdas;
    double mc_variance = 0.0;
    for (std::uint64_t p = 0; p < patterns; ++p) {
      const std::uint64_t task = e * patterns + p;
      const GradientPattern pattern = random_pattern(n, k, derive_seed(seed, Stream::kPattern, task));
      const DimensionEstimate est =
          minimize_expected_dist(pattern, samples, derive_seed(seed, task), options.distance);
      deltas.push_back(est.mean / static_cast<double>(n));
      lambdas.push_back(est.lambda_star.value_or(0.0));
      const double se = est.std_error / static_cast<double>(n);
      mc_variance += se * se;
    }
    const auto count = static_cast<double>(patterns);
    const MeanAndError spread = summarize(deltas);
    const double mc_error = std::sqrt(mc_variance) / count;

    CurvePoint point;
    point.epsilon = eps;
    point.delta_pred = spread.mean;
    point.std_error = patterns > 1 ? std::max(spread.std_error, mc_error) : mc_error;
    point.lambda_star = std::accumulate(lambdas.begin(), lambdas.end(), 0.0) / count;
    point.samples = samples;
    point.n = n;
    point.seed = seed;
    curve.push_back(point);
  }
  return curve;
}

}  // namespace tvpt
