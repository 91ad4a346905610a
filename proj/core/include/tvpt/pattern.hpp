#pragma once

#include <cstdint>
#include <vector>

#include "tvpt/common.hpp"
#include "tvpt/gradient_pattern.hpp"

namespace tvpt {

struct PatternOptions {
  /// Pairs with |x_i - x_{i+1}| <= tie_tol are flat. The default of zero is
  /// meant for exact inputs; noisy data needs an explicit tolerance.
  double tie_tol = 0.0;
  /// Reject the all-zero signal, for which the subdifferential certificate is
  /// not claimed.
  bool require_nonzero = false;
};

/// Reads the flat/sign structure off a signal (n >= 2). Fixed signs follow
/// sign(x_i - x_{i+1}).
GradientPattern extract_pattern(const Vector& x, const PatternOptions& options = {});

/// Uniformly random pattern with exactly k fixed (nonzero-gradient) indices
/// carrying independent uniform signs. Requires n >= 2 and 0 <= k <= n-1.
GradientPattern random_pattern(Index n, Index k, std::uint64_t seed);

/// Subgradient coefficients v0 such that B^T v0 is orthogonal to every
/// difference of subgradients. Fixed coordinates copy the pattern signs; each
/// flat group solves H(l) t = (sum of neighbouring fixed signs), which keeps
/// every coordinate inside [-1, 1].
Vector construct_v0(const GradientPattern& pattern);

struct SubgradientCertificate {
  Vector v0;
  double max_abs = 0.0;
  /// max over flat i of |((BB^T) v0)_i|.
  double row_residual = 0.0;
  /// max over sampled v of |<B^T v - B^T v0, B^T v0>|.
  double orthogonality_residual = 0.0;
  /// v0 differs from a fixed sign somewhere.
  bool sign_mismatch = false;
  int samples = 0;
  double tol = 0.0;
  bool pass = false;
};

/// Checks box feasibility, the exact row condition on the flat set and the
/// orthogonality condition on `n_samples` random members of the
/// subdifferential. Failures are reported through `pass`, never thrown.
SubgradientCertificate verify_weak_decomposability(const GradientPattern& pattern, const Vector& v0,
                                                   double tol, int n_samples, std::uint64_t seed);

/// One nonzero of the coupling matrix H(l)^{-1} (BB^T)_{S,S^c} restricted to
/// a flat row: the fixed index it couples to and its weight.
struct CouplingEntry {
  Index fixed_index = 0;
  double weight = 0.0;
};

/// Rows of -(BB^T)_{S,S}^{-1}(BB^T)_{S,S^c} up to sign, i.e. v0 restricted to S
/// equals -sum(weight * sign(fixed_index)) over each row. One row per flat
/// index, in increasing order. Uses the closed-form block inverse.
std::vector<std::vector<CouplingEntry>> coupling_rows(const GradientPattern& pattern);

}  // namespace tvpt
