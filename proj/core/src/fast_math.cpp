#include "fast_math.hpp"

#include <cmath>

namespace alg::detail {

void floored_log(const double* __restrict in, double* __restrict out, std::size_t n, double floor) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = in[i] > floor ? in[i] : floor;
    out[i] = std::log(v);
  }
}

}  // namespace alg::detail
