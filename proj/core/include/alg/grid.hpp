#pragma once

// Phase-space grid [0,1)^2 x [0,2pi) and the cell-averaged orientation density.

#include <cstddef>
#include <vector>

namespace alg {

class Grid {
 public:
  Grid() = default;
  /// All counts must be >= 4. Throws InvalidParameter.
  Grid(int n_x1, int n_x2, int n_theta);

  int n_x1() const noexcept { return n_x1_; }
  int n_x2() const noexcept { return n_x2_; }
  int n_theta() const noexcept { return n_theta_; }
  double dx1() const noexcept { return 1.0 / n_x1_; }
  double dx2() const noexcept { return 1.0 / n_x2_; }
  double dtheta() const noexcept;
  double cell_volume() const noexcept { return dx1() * dx2() * dtheta(); }

  std::size_t cells() const noexcept { return static_cast<std::size_t>(n_x1_) * n_x2_ * n_theta_; }
  std::size_t columns() const noexcept { return static_cast<std::size_t>(n_x1_) * n_x2_; }
  /// Row-major (i, j, k), k fastest.
  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * n_x2_ + j) * n_theta_ + k;
  }
  std::size_t column(int i, int j) const noexcept { return static_cast<std::size_t>(i) * n_x2_ + j; }

  bool operator==(const Grid&) const = default;

 private:
  int n_x1_ = 4;
  int n_x2_ = 4;
  int n_theta_ = 4;
};

/// f_{i,j,k}: density per unit area per radian, cell centres at (i dx1, j dx2, k dtheta).
struct OrientationField {
  Grid grid;
  std::vector<double> values;
  double time = 0.0;

  OrientationField() = default;
  explicit OrientationField(const Grid& g, double fill = 0.0) : grid(g), values(g.cells(), fill) {}

  double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }

  double mass() const;
  double min_value() const;
};

struct Moments {
  Grid grid;
  std::vector<double> rho;  // per column (i, j)
  std::vector<double> p1;
  std::vector<double> p2;
};

/// Rectangle-rule angular moments rho = dtheta sum_k f, p = dtheta sum_k e_{k dtheta} f.
Moments moments(const OrientationField& f);

/// Discrete L2 norm sqrt(dx1 dx2 dtheta sum (f - reference)^2).
double norm_l2tilde(const OrientationField& f, double reference);

/// Discrete free energy sum dx1 dx2 [(1-rho) log(1-rho) + dtheta sum_k f log(2 pi f)].
double free_energy(const OrientationField& f);

}  // namespace alg
