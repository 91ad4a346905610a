#pragma once

#include <span>
#include <vector>

namespace tvpt {

/// Weighted least-squares projection onto nondecreasing sequences
/// (pool-adjacent-violators). `weights` must be positive and match `values`;
/// an empty `weights` means unit weights.
std::vector<double> isotonic_increasing(std::span<const double> values,
                                        std::span<const double> weights = {});

}  // namespace tvpt
