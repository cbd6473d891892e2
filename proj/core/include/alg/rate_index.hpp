#pragma once

// Fenwick tree over nonnegative rates: O(log n) point updates, total-rate
// queries and rate-weighted sampling.

#include <cstddef>
#include <vector>

namespace alg {

class RateIndex {
 public:
  RateIndex() = default;
  explicit RateIndex(std::size_t n) { assign(std::vector<double>(n, 0.0)); }

  /// Rebuilds from scratch in O(n).
  void assign(std::vector<double> rates);
  void set(std::size_t i, double rate);

  double rate(std::size_t i) const { return leaf_[i]; }
  std::size_t size() const noexcept { return leaf_.size(); }
  const std::vector<double>& rates() const noexcept { return leaf_; }

  /// Sum of leaves [0, i).
  double prefix(std::size_t i) const;
  double total() const { return prefix(leaf_.size()); }

  /// Smallest i with prefix(i + 1) > target, for target in [0, total()).
  /// Never returns a zero-rate leaf.
  std::size_t find(double target) const;

 private:
  std::vector<double> leaf_;
  std::vector<double> tree_;  // 1-based partial sums
  std::size_t top_bit_ = 0;
};

}  // namespace alg
