#include "tvpt/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tvpt/diffop.hpp"
#include "tvpt/random.hpp"

namespace tvpt {

GradientPattern::GradientPattern(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
  const Index size = gradient_size();
  for (Index i = 0; i < size;) {
    if (!is_flat(i)) {
      ++i;
      continue;
    }
    Index end = i;
    while (end + 1 < size && is_flat(end + 1)) ++end;
    groups_.push_back({i, end});
    flat_count_ += end - i + 1;
    i = end + 1;
  }
}

GradientPattern GradientPattern::from_signs(std::vector<std::int8_t> signs) {
  if (signs.empty()) throw std::invalid_argument("pattern needs at least one gradient index (n >= 2)");
  for (const std::int8_t s : signs) {
    if (s != 0 && s != 1 && s != -1) throw std::invalid_argument("pattern signs must be 0, +1 or -1");
  }
  return GradientPattern(std::move(signs));
}

GradientPattern GradientPattern::from_groups(Index n, const std::vector<FlatGroup>& groups,
                                             const std::map<Index, int>& fixed_signs) {
  if (n < 2) throw std::invalid_argument("pattern needs n >= 2");
  const Index size = n - 1;
  std::vector<std::int8_t> signs(static_cast<std::size_t>(size), 2);
  Index previous_end = -2;
  for (const FlatGroup& group : groups) {
    if (group.begin > group.end || group.begin < 0 || group.end >= size) {
      throw std::invalid_argument("flat group out of range");
    }
    if (group.begin - previous_end <= 1) {
      throw std::invalid_argument("flat groups must be sorted and separated by a fixed index");
    }
    for (Index i = group.begin; i <= group.end; ++i) signs[static_cast<std::size_t>(i)] = 0;
    previous_end = group.end;
  }
  for (const auto& [index, sign] : fixed_signs) {
    if (index < 0 || index >= size) throw std::invalid_argument("fixed sign index out of range");
    if (sign != 1 && sign != -1) throw std::invalid_argument("fixed signs must be +1 or -1");
    if (signs[static_cast<std::size_t>(index)] != 2) {
      throw std::invalid_argument("index " + std::to_string(index) + " is both flat and fixed");
    }
    signs[static_cast<std::size_t>(index)] = static_cast<std::int8_t>(sign);
  }
  if (std::find(signs.begin(), signs.end(), std::int8_t{2}) != signs.end()) {
    throw std::invalid_argument("every gradient index must be flat or carry a fixed sign");
  }
  return GradientPattern(std::move(signs));
}

std::map<Index, int> GradientPattern::fixed_signs() const {
  std::map<Index, int> out;
  for (Index i = 0; i < gradient_size(); ++i) {
    if (!is_flat(i)) out.emplace(i, sign(i));
  }
  return out;
}

Vector GradientPattern::fixed_part() const {
  Vector v(gradient_size());
  for (Index i = 0; i < gradient_size(); ++i) v[i] = sign(i);
  return v;
}

GradientPattern extract_pattern(const Vector& x, const PatternOptions& options) {
  if (x.size() < 2) throw std::invalid_argument("extract_pattern needs a signal of length >= 2");
  if (!(options.tie_tol >= 0.0)) throw std::invalid_argument("tie_tol must be nonnegative");
  if (!x.allFinite()) throw std::invalid_argument("extract_pattern: signal has non-finite entries");
  if (options.require_nonzero && (x.array() == 0.0).all()) {
    throw std::invalid_argument("extract_pattern: the zero signal has no certificate");
  }
  std::vector<std::int8_t> signs(static_cast<std::size_t>(x.size() - 1));
  for (Index i = 0; i + 1 < x.size(); ++i) {
    const double d = x[i] - x[i + 1];
    signs[static_cast<std::size_t>(i)] = std::abs(d) <= options.tie_tol ? 0 : (d > 0 ? 1 : -1);
  }
  return GradientPattern::from_signs(std::move(signs));
}

GradientPattern random_pattern(Index n, Index k, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_pattern needs n >= 2");
  if (k < 0 || k > n - 1) {
    throw std::invalid_argument("random_pattern: k must lie in [0, n-1], got " + std::to_string(k));
  }
  const auto size = static_cast<std::size_t>(n - 1);
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::vector<std::int8_t> signs(size, 0);
  // Partial Fisher-Yates: the first k slots become the fixed indices.
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(size - i));
    std::swap(order[i], order[j]);
    signs[order[i]] = static_cast<std::int8_t>(rng.sign());
  }
  return GradientPattern::from_signs(std::move(signs));
}

Vector construct_v0(const GradientPattern& pattern) {
  const Index size = pattern.gradient_size();
  Vector v0 = pattern.fixed_part();
  Vector rhs(pattern.flat_count());
  Index offset = 0;
  for (const FlatGroup& group : pattern.groups()) {
    auto block = rhs.segment(offset, group.length());
    block.setZero();
    // (BB^T)_{S,S^c} has -1 exactly where a flat row touches a fixed neighbour,
    // and only the first and last row of a group can touch one.
    if (group.begin > 0) block[0] += pattern.sign(group.begin - 1);
    if (group.end + 1 < size) block[group.length() - 1] += pattern.sign(group.end + 1);
    offset += group.length();
  }
  const Vector flat_values = solve_restricted_gram(pattern, rhs);
  offset = 0;
  for (const FlatGroup& group : pattern.groups()) {
    // The exact solution lies in [-1, 1]; elimination can overshoot by an ulp.
    v0.segment(group.begin, group.length()) =
        flat_values.segment(offset, group.length()).cwiseMax(-1.0).cwiseMin(1.0);
    offset += group.length();
  }
  return v0;
}

SubgradientCertificate verify_weak_decomposability(const GradientPattern& pattern, const Vector& v0,
                                                   double tol, int n_samples, std::uint64_t seed) {
  if (v0.size() != pattern.gradient_size()) {
    throw std::invalid_argument("verify_weak_decomposability: v0 has the wrong length");
  }
  SubgradientCertificate cert;
  cert.v0 = v0;
  cert.tol = tol;
  cert.samples = std::max(0, n_samples);
  cert.max_abs = v0.size() > 0 ? v0.cwiseAbs().maxCoeff() : 0.0;

  const DifferenceOperator op(pattern.n());
  const Vector gram_v0 = op.gram(v0);
  for (Index i = 0; i < pattern.gradient_size(); ++i) {
    if (pattern.is_flat(i)) {
      cert.row_residual = std::max(cert.row_residual, std::abs(gram_v0[i]));
    } else if (v0[i] != pattern.sign(i)) {
      cert.sign_mismatch = true;
    }
  }

  const Vector w0 = op.adjoint(v0);
  Rng rng(seed);
  for (int s = 0; s < cert.samples; ++s) {
    Vector v = pattern.fixed_part();
    for (Index i = 0; i < v.size(); ++i) {
      if (pattern.is_flat(i)) v[i] = 2.0 * rng.uniform() - 1.0;
    }
    const double inner = (op.adjoint(v) - w0).dot(w0);
    cert.orthogonality_residual = std::max(cert.orthogonality_residual, std::abs(inner));
  }

  cert.pass = std::isfinite(cert.max_abs) && cert.max_abs <= 1.0 + tol && cert.row_residual <= tol &&
              cert.orthogonality_residual <= tol && !cert.sign_mismatch;
  return cert;
}

std::vector<std::vector<CouplingEntry>> coupling_rows(const GradientPattern& pattern) {
  std::vector<std::vector<CouplingEntry>> rows;
  rows.reserve(static_cast<std::size_t>(pattern.flat_count()));
  const Index size = pattern.gradient_size();
  for (const FlatGroup& group : pattern.groups()) {
    const Index l = group.length();
    for (Index r = 1; r <= l; ++r) {
      std::vector<CouplingEntry> row;
      if (group.begin > 0) row.push_back({group.begin - 1, -h_inverse_entry(r, 1, l)});
      if (group.end + 1 < size) row.push_back({group.end + 1, -h_inverse_entry(r, l, l)});
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace tvpt
