#pragma once

// Coarse-grained observables shared by the lattice and continuum models.

#include <cstddef>
#include <optional>
#include <vector>

#include "alg/grid.hpp"
#include "alg/micro.hpp"

namespace alg {

/// Scalar or two-component field on an n x n periodic grid, index i * n + j.
struct CoarseField {
  int n = 0;
  double eps = 0.0;        // requested window half-width
  int radius = 0;          // half-width in grid units actually used
  std::vector<double> values;
  std::vector<double> values2;  // second component for polarisation, else empty
};

/// Box average of occupancy over (2 floor(eps N) + 1)^2 sites. Needs floor(eps N) >= 1.
CoarseField local_density(const MicroState& s, double eps);
/// Box average of (cos theta, sin theta) over occupied sites, same normalisation.
CoarseField local_polarisation(const MicroState& s, double eps);

/// |N^-2 sum eta e^{2 pi i z1/N}| + |N^-2 sum eta e^{2 pi i z2/N}|.
double phi_order(const MicroState& s);

/// Average of rho over the periodic box [x - eps, x + eps]^2 at every cell
/// centre. eps is rounded down to a multiple of the cell width; the two
/// boundary cells of the box on each axis are half covered.
CoarseField coarse_macro_density(const std::vector<double>& rho, int n, double eps);

struct DensityHistogram {
  std::vector<double> edges;        // bins + 1 increasing values
  std::vector<double> probability;  // sums to 1
};

std::vector<double> uniform_edges(int bins = 50, double lo = 0.0, double hi = 1.0);

/// Pooled normalised histogram of all values of all fields. The last bin is
/// closed on the right; values outside the edges throw DomainError.
DensityHistogram histogram(const std::vector<CoarseField>& fields, const std::vector<double>& edges);
DensityHistogram histogram(const std::vector<std::vector<double>>& samples, const std::vector<double>& edges);

/// 0.5 * sum |p1 - p2|. Throws InvalidParameter on mismatched edges.
double histogram_distance(const DensityHistogram& a, const DensityHistogram& b);

struct Bimodality {
  std::optional<double> dilute_peak;  // bin centre of the highest local max below split
  std::optional<double> dense_peak;   // bin centre of the highest local max above split
  bool bimodal() const { return dilute_peak && dense_peak; }
};

Bimodality find_peaks(const DensityHistogram& h, double split = 0.5);

}  // namespace alg
