#pragma once

// Reference computations for the test suites. Nothing here calls into the
// library's numerical kernels; each value is rebuilt from its definition.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

// Printed polynomial, evaluated in long double directly from its factors.
inline long double alpha_ld() { return std::numbers::pi_v<long double> / 2.0L - 1.0L; }
inline long double beta_ld() {
  const long double a = alpha_ld();
  return a * (2.0L * a - 1.0L) / (2.0L * a + 1.0L);
}
inline double self_diffusion(double rho) {
  const long double r = rho;
  return static_cast<double>((1.0L - r) * (1.0L - alpha_ld() * r + beta_ld() * r * r));
}
// (1 - ds)/rho via the expanded numerator; fine away from rho = 0.
inline double cal_d(double rho) {
  const long double r = rho;
  if (r == 0.0L) return static_cast<double>(1.0L + alpha_ld());
  return static_cast<double>((1.0L - static_cast<long double>(self_diffusion(rho))) / r);
}

struct GaussLegendre {
  std::vector<double> nodes, weights;
  explicit GaussLegendre(int n) {
    for (int i = 1; i <= n; ++i) {
      long double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
      long double dp = 1.0L;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1.0L, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0L);
        const long double dz = p1 / dp;
        z -= dz;
        if (std::fabs(static_cast<double>(dz)) < 1e-19) break;
      }
      nodes.push_back(static_cast<double>(z));
      weights.push_back(static_cast<double>(2.0L / ((1.0L - z * z) * dp * dp)));
    }
  }
};

// int_a^b D(x)/ds(x) dx by composite 20-point Gauss-Legendre in the variable
// u = -log(1 - x), which turns the pole at 1 into a smooth exponential tail.
inline double q_difference(double a, double b) {
  static const GaussLegendre rule(20);
  const double ua = -std::log1p(-a), ub = -std::log1p(-b);
  constexpr int panels = 400;
  long double acc = 0.0L;
  for (int p = 0; p < panels; ++p) {
    const double lo = ua + (ub - ua) * p / panels, hi = ua + (ub - ua) * (p + 1) / panels;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i];
      const double x = -std::expm1(-u);
      // dx = (1 - x) du; ds carries the (1 - x) factor, so cancel it exactly.
      const long double r = x;
      const long double integrand =
          ((1.0L + alpha_ld()) - (alpha_ld() + beta_ld()) * r + beta_ld() * r * r) /
          (1.0L - alpha_ld() * r + beta_ld() * r * r);
      acc += 0.5L * (hi - lo) * rule.weights[i] * integrand;
    }
  }
  return static_cast<double>(acc);
}

// Central finite difference of a scalar function.
template <class F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Site occupancy average over the (2r+1)^2 periodic box, by direct loops.
inline std::vector<double> box_average(const std::vector<double>& occ, int n, int r) {
  std::vector<double> out(occ.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int di = -r; di <= r; ++di)
        for (int dj = -r; dj <= r; ++dj) s += occ[((i + di + n) % n) * n + (j + dj + n) % n];
      out[i * n + j] = s / ((2.0 * r + 1) * (2.0 * r + 1));
    }
  return out;
}

}  // namespace oracle
