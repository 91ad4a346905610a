#include "tvpt/diffop.hpp"

#include <stdexcept>
#include <string>

namespace tvpt {

DifferenceOperator::DifferenceOperator(Index n) : n_(n) {
  if (n < 2) throw std::invalid_argument("difference operator needs n >= 2, got " + std::to_string(n));
}

Vector DifferenceOperator::apply(const Vector& x) const {
  if (x.size() != n_) throw std::invalid_argument("forward difference: length mismatch");
  return x.head(n_ - 1) - x.tail(n_ - 1);
}

Vector DifferenceOperator::adjoint(const Vector& w) const {
  if (w.size() != n_ - 1) throw std::invalid_argument("adjoint difference: length mismatch");
  Vector out(n_);
  out[0] = w[0];
  out.segment(1, n_ - 2) = w.tail(n_ - 2) - w.head(n_ - 2);
  out[n_ - 1] = -w[n_ - 2];
  return out;
}

Vector DifferenceOperator::gram(const Vector& w) const {
  if (w.size() != n_ - 1) throw std::invalid_argument("gram: length mismatch");
  const Index m = n_ - 1;
  Vector out = 2.0 * w;
  if (m > 1) {
    out.head(m - 1) -= w.tail(m - 1);
    out.tail(m - 1) -= w.head(m - 1);
  }
  return out;
}

Vector forward_difference(const Vector& x) { return DifferenceOperator(x.size()).apply(x); }

Vector adjoint_difference(const Vector& w) {
  if (w.size() < 1) throw std::invalid_argument("adjoint difference needs at least one coefficient");
  return DifferenceOperator(w.size() + 1).adjoint(w);
}

double tv_seminorm(const Vector& x) { return forward_difference(x).lpNorm<1>(); }

double gram_inverse_entry(Index row, Index col, Index n) {
  if (n < 2 || row < 1 || col < 1 || row > n - 1 || col > n - 1) {
    throw std::out_of_range("gram_inverse_entry: index out of range");
  }
  if (row > col) std::swap(row, col);
  return static_cast<double>(row) * static_cast<double>(n - col) / static_cast<double>(n);
}

double h_inverse_entry(Index row, Index col, Index l) {
  if (l < 1 || row < 1 || col < 1 || row > l || col > l) {
    throw std::out_of_range("h_inverse_entry: index out of range");
  }
  if (row > col) std::swap(row, col);
  // H(l) is the Gram matrix of an (l+1)-point difference operator.
  return gram_inverse_entry(row, col, l + 1);
}

void solve_h_block(std::span<double> rhs) {
  const std::size_t l = rhs.size();
  if (l == 0) return;
  // The k-th elimination pivot of H(l) is exactly (k+1)/k.
  for (std::size_t k = 1; k <= l; ++k) {
    const double scale = static_cast<double>(k) / static_cast<double>(k + 1);
    const double carry = k > 1 ? rhs[k - 2] : 0.0;
    rhs[k - 1] = (rhs[k - 1] + carry) * scale;
  }
  for (std::size_t k = l - 1; k >= 1; --k) {
    const double scale = static_cast<double>(k) / static_cast<double>(k + 1);
    rhs[k - 1] += rhs[k] * scale;
  }
}

Vector solve_restricted_gram(const GradientPattern& pattern, const Vector& rhs) {
  if (rhs.size() != pattern.flat_count()) {
    throw std::invalid_argument("solve_restricted_gram: rhs length must equal the flat count");
  }
  Vector t = rhs;
  Index offset = 0;
  for (const FlatGroup& group : pattern.groups()) {
    const Index l = group.length();
    solve_h_block(std::span<double>(t.data() + offset, static_cast<std::size_t>(l)));
    offset += l;
  }
  return t;
}

}  // namespace tvpt
