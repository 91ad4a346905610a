#include "tvpt/tv_block.hpp"

#include <algorithm>
#include <cassert>
#include <cstddef>

namespace tvpt {

void tv_denoise(std::span<const double> input, double lambda, std::span<double> output) {
  assert(output.size() == input.size());
  const std::ptrdiff_t width = static_cast<std::ptrdiff_t>(input.size());
  if (width == 0) return;
  if (lambda <= 0.0 || width == 1) {
    std::copy(input.begin(), input.end(), output.begin());
    return;
  }

  // k: current sample, k0: start of the current segment, kplus / kminus: last
  // positions where the dual variable touched -lambda / +lambda. The segment
  // value is confined to [vmin, vmax]; umin / umax track the dual variable at
  // those two extremes.
  std::ptrdiff_t k = 0;
  std::ptrdiff_t k0 = 0;
  std::ptrdiff_t kplus = 0;
  std::ptrdiff_t kminus = 0;
  double umin = lambda;
  double umax = -lambda;
  double vmin = input[0] - lambda;
  double vmax = input[0] + lambda;
  const double twolambda = 2.0 * lambda;
  const double minlambda = -lambda;

  for (;;) {
    while (k == width - 1) {
      if (umin < 0.0) {
        do output[k0++] = vmin; while (k0 <= kminus);
        k = kminus = k0;
        vmin = input[k];
        umin = lambda;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do output[k0++] = vmax; while (k0 <= kplus);
        k = kplus = k0;
        vmax = input[k];
        umax = minlambda;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do output[k0++] = vmin; while (k0 <= k);
        return;
      }
    }
    if ((umin += input[k + 1] - vmin) < minlambda) {
      do output[k0++] = vmin; while (k0 <= kminus);
      k = kplus = kminus = k0;
      vmin = input[k];
      vmax = vmin + twolambda;
      umin = lambda;
      umax = minlambda;
    } else if ((umax += input[k + 1] - vmax) > lambda) {
      do output[k0++] = vmax; while (k0 <= kplus);
      k = kplus = kminus = k0;
      vmax = input[k];
      vmin = vmax - twolambda;
      umin = lambda;
      umax = minlambda;
    } else {
      ++k;
      if (umin >= lambda) {
        kminus = k;
        vmin += (umin - lambda) / static_cast<double>(kminus - k0 + 1);
        umin = lambda;
      }
      if (umax <= minlambda) {
        kplus = k;
        vmax += (umax + lambda) / static_cast<double>(kplus - k0 + 1);
        umax = minlambda;
      }
    }
  }
}

void solve_block_dual(std::span<const double> r, double lambda, std::span<double> v,
                      std::span<double> scratch) {
  assert(lambda > 0.0);
  assert(r.size() == v.size() + 1 && scratch.size() == r.size());
  tv_denoise(r, lambda, scratch);
  double running = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    running += r[j] - scratch[j];
    if (scratch[j] > scratch[j + 1]) {
      v[j] = 1.0;
    } else if (scratch[j] < scratch[j + 1]) {
      v[j] = -1.0;
    } else {
      v[j] = std::clamp(running / lambda, -1.0, 1.0);
    }
  }
}

}  // namespace tvpt
