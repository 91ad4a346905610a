#pragma once

#include <span>

#include "tvpt/common.hpp"
#include "tvpt/gradient_pattern.hpp"

namespace tvpt {

/// Matrix-free forward-difference operator B: R^n -> R^(n-1) with
/// (Bx)_i = x_i - x_{i+1}. The Gram matrix BB^T is tridiagonal with 2 on the
/// diagonal and -1 off it; its spectrum lies in (0, 4).
class DifferenceOperator {
 public:
  /// Throws std::invalid_argument when n < 2.
  explicit DifferenceOperator(Index n);

  Index n() const { return n_; }
  Index rows() const { return n_ - 1; }

  Vector apply(const Vector& x) const;
  Vector adjoint(const Vector& w) const;
  /// (BB^T) w.
  Vector gram(const Vector& w) const;

  /// Upper bound on ||BB^T||_2.
  static constexpr double kGramNormBound = 4.0;

 private:
  Index n_;
};

Vector forward_difference(const Vector& x);

/// B^T w for w of length n-1 >= 1: out_0 = w_0, out_i = w_i - w_{i-1},
/// out_{n-1} = -w_{n-2}.
Vector adjoint_difference(const Vector& w);

/// ||Bx||_1.
double tv_seminorm(const Vector& x);

/// Closed-form ((BB^T)^{-1})_{row,col} for the (n-1)x(n-1) Gram matrix.
/// Indices are 1-based, matching the usual matrix notation.
double gram_inverse_entry(Index row, Index col, Index n);

/// Closed-form (H(l)^{-1})_{row,col}, where H(l) is the l x l tridiagonal
/// matrix with 2 on the diagonal and -1 off it: row(l+1-col)/(l+1) for
/// row <= col, symmetric otherwise. Indices are 1-based.
double h_inverse_entry(Index row, Index col, Index l);

/// Solves H(l) t = rhs in place, l = rhs.size(), by tridiagonal elimination.
void solve_h_block(std::span<double> rhs);

/// Solves (BB^T)_{S,S} t = rhs where S is the flat set of `pattern` and rhs
/// is ordered like S. The restricted Gram matrix is block diagonal with one
/// H(length) block per flat group, so each block is solved independently.
Vector solve_restricted_gram(const GradientPattern& pattern, const Vector& rhs);

}  // namespace tvpt
