#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tvpt/common.hpp"

namespace tvpt {

/// Maximal run [begin, end] (inclusive, 0-based gradient indices) of flat
/// gradient coordinates.
struct FlatGroup {
  Index begin = 0;
  Index end = 0;

  Index length() const { return end - begin + 1; }
  friend bool operator==(const FlatGroup&, const FlatGroup&) = default;
};

/// Flat-region structure of a length-n signal. Gradient index i (0-based,
/// i < n-1) is either flat, where the subgradient coordinate is free in
/// [-1, 1], or carries a fixed sign +1/-1.
///
/// Invariants: groups are sorted, disjoint, maximal and separated by at least
/// one fixed index; every gradient index is either in a group or fixed.
class GradientPattern {
 public:
  /// `signs` has one entry per gradient index: 0 marks a flat index, +1/-1 a
  /// fixed sign. Throws std::invalid_argument on other values or an empty
  /// vector.
  static GradientPattern from_signs(std::vector<std::int8_t> signs);

  /// Builds the pattern from its group list and the fixed signs on the
  /// complement. Throws std::invalid_argument unless the inputs describe a
  /// valid partition of the n-1 gradient indices.
  static GradientPattern from_groups(Index n, const std::vector<FlatGroup>& groups,
                                     const std::map<Index, int>& fixed_signs);

  Index n() const { return static_cast<Index>(signs_.size()) + 1; }
  Index gradient_size() const { return static_cast<Index>(signs_.size()); }

  const std::vector<FlatGroup>& groups() const { return groups_; }
  std::span<const std::int8_t> signs() const { return signs_; }

  bool is_flat(Index i) const { return signs_[static_cast<std::size_t>(i)] == 0; }
  int sign(Index i) const { return signs_[static_cast<std::size_t>(i)]; }

  Index flat_count() const { return flat_count_; }
  Index fixed_count() const { return gradient_size() - flat_count_; }

  /// Fixed signs keyed by gradient index.
  std::map<Index, int> fixed_signs() const;

  /// Length n-1 vector holding the fixed signs and zeros on flat indices.
  Vector fixed_part() const;

  friend bool operator==(const GradientPattern& a, const GradientPattern& b) {
    return a.signs_ == b.signs_;
  }

 private:
  explicit GradientPattern(std::vector<std::int8_t> signs);

  std::vector<std::int8_t> signs_;
  std::vector<FlatGroup> groups_;
  Index flat_count_ = 0;
};

}  // namespace tvpt
