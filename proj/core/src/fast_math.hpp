#pragma once

#include <cstddef>

namespace alg::detail {

// out[i] = log(max(in[i], floor)). Built with relaxed FP flags so the loop
// vectorises through libmvec; results are deterministic for a given build.
void floored_log(const double* in, double* out, std::size_t n, double floor);

}  // namespace alg::detail
