#include "alg/rate_index.hpp"

#include <bit>

#include "alg/error.hpp"

namespace alg {

void RateIndex::assign(std::vector<double> rates) {
  for (double r : rates)
    if (!(r >= 0.0)) throw InvalidParameter("RateIndex: rates must be nonnegative");
  leaf_ = std::move(rates);
  const std::size_t n = leaf_.size();
  tree_.assign(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    tree_[i] += leaf_[i - 1];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= n) tree_[parent] += tree_[i];
  }
  top_bit_ = n == 0 ? 0 : std::bit_floor(n);
}

void RateIndex::set(std::size_t i, double rate) {
  const double delta = rate - leaf_[i];
  if (delta == 0.0) return;
  leaf_[i] = rate;
  for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
}

double RateIndex::prefix(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = i; k > 0; k -= k & (~k + 1)) s += tree_[k];
  return s;
}

std::size_t RateIndex::find(double target) const {
  std::size_t pos = 0;
  for (std::size_t step = top_bit_; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next < tree_.size() && tree_[next] <= target) {
      pos = next;
      target -= tree_[next];
    }
  }
  // Rounding in the partial sums can land on an empty leaf; move to the
  // nearest positive one.
  if (pos >= leaf_.size()) pos = leaf_.size() - 1;
  if (leaf_[pos] > 0.0) return pos;
  for (std::size_t k = pos; k-- > 0;)
    if (leaf_[k] > 0.0) return k;
  for (std::size_t k = pos + 1; k < leaf_.size(); ++k)
    if (leaf_[k] > 0.0) return k;
  throw NumericalAbort("RateIndex: sampling from an all-zero index");
}

}  // namespace alg
