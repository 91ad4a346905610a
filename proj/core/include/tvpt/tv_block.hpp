#pragma once

#include <span>

namespace tvpt {

/// Exact 1-D total-variation denoising:
///   output = argmin_x 1/2 ||x - input||^2 + lambda * sum_i |x_i - x_{i+1}|
/// computed by Condat's direct (taut-string style) algorithm in O(size) typical
/// time. `output` must have the same size as `input`; lambda >= 0.
void tv_denoise(std::span<const double> input, double lambda, std::span<double> output);

/// Solves the box-constrained dual of one flat block,
///   min_{v in [-1,1]^l} 1/2 ||r - lambda D^T v||^2,
/// where r has length l+1 and D is the l x (l+1) difference (Dx)_i = x_i - x_{i+1}.
/// The primal solution of the denoising problem gives v through
/// lambda D^T v = r - x; coordinates at jumps are snapped to their exact +-1.
/// `scratch` must have length l+1. Requires lambda > 0.
void solve_block_dual(std::span<const double> r, double lambda, std::span<double> v,
                      std::span<double> scratch);

}  // namespace tvpt
