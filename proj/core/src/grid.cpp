#include "alg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "alg/error.hpp"

namespace alg {

Grid::Grid(int n_x1, int n_x2, int n_theta) : n_x1_(n_x1), n_x2_(n_x2), n_theta_(n_theta) {
  if (n_x1 < 4 || n_x2 < 4 || n_theta < 4)
    throw InvalidParameter("grid counts must be >= 4, got " + std::to_string(n_x1) + "x" + std::to_string(n_x2) +
                           "x" + std::to_string(n_theta));
}

double Grid::dtheta() const noexcept { return 2.0 * std::numbers::pi / n_theta_; }

double OrientationField::mass() const {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * grid.cell_volume();
}

double OrientationField::min_value() const { return *std::min_element(values.begin(), values.end()); }

Moments moments(const OrientationField& f) {
  const Grid& g = f.grid;
  const int nt = g.n_theta();
  const double dth = g.dtheta();
  std::vector<double> c(nt), s(nt);
  for (int k = 0; k < nt; ++k) {
    c[k] = std::cos(k * dth);
    s[k] = std::sin(k * dth);
  }
  Moments m{g, std::vector<double>(g.columns()), std::vector<double>(g.columns()), std::vector<double>(g.columns())};
  for (std::size_t col = 0; col < g.columns(); ++col) {
    const double* fc = f.values.data() + col * nt;
    double r = 0.0, a = 0.0, b = 0.0;
    for (int k = 0; k < nt; ++k) {
      r += fc[k];
      a += c[k] * fc[k];
      b += s[k] * fc[k];
    }
    m.rho[col] = dth * r;
    m.p1[col] = dth * a;
    m.p2[col] = dth * b;
  }
  return m;
}

double norm_l2tilde(const OrientationField& f, double reference) {
  double acc = 0.0;
  for (double v : f.values) acc += (v - reference) * (v - reference);
  return std::sqrt(f.grid.cell_volume() * acc);
}

double free_energy(const OrientationField& f) {
  const Grid& g = f.grid;
  const int nt = g.n_theta();
  const double dth = g.dtheta();
  const double two_pi = 2.0 * std::numbers::pi;
  double total = 0.0;
  for (std::size_t col = 0; col < g.columns(); ++col) {
    const double* fc = f.values.data() + col * nt;
    double rho = 0.0, ent = 0.0;
    for (int k = 0; k < nt; ++k) {
      rho += fc[k];
      if (fc[k] > 0.0) ent += fc[k] * std::log(two_pi * fc[k]);
    }
    rho *= dth;
    const double vac = std::max(1.0 - rho, 0.0);
    total += (vac > 0.0 ? vac * std::log(vac) : 0.0) + dth * ent;
  }
  return total * g.dx1() * g.dx2();
}

}  // namespace alg
