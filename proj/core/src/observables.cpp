#include "alg/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "alg/error.hpp"

namespace alg {

namespace {

// Periodic box sum of width 2r+1 along rows then columns, O(n^2).
std::vector<double> box_sum(const std::vector<double>& v, int n, int r) {
  std::vector<double> tmp(v.size()), out(v.size());
  auto wrap = [n](int k) { return ((k % n) + n) % n; };
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int d = -r; d <= r; ++d) s += v[static_cast<std::size_t>(i) * n + wrap(d)];
    for (int j = 0; j < n; ++j) {
      tmp[static_cast<std::size_t>(i) * n + j] = s;
      s += v[static_cast<std::size_t>(i) * n + wrap(j + r + 1)] - v[static_cast<std::size_t>(i) * n + wrap(j - r)];
    }
  }
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int d = -r; d <= r; ++d) s += tmp[static_cast<std::size_t>(wrap(d)) * n + j];
    for (int i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i) * n + j] = s;
      s += tmp[static_cast<std::size_t>(wrap(i + r + 1)) * n + j] - tmp[static_cast<std::size_t>(wrap(i - r)) * n + j];
    }
  }
  return out;
}

int window_radius(int n, double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("coarse window: eps must be positive");
  // Tolerate eps*N landing a hair below an integer.
  const int r = static_cast<int>(std::floor(eps * n + 1e-9));
  if (r < 1) throw InvalidParameter("coarse window: floor(eps N) must be at least 1");
  if (2 * r + 1 > n) throw InvalidParameter("coarse window: box wider than the lattice");
  return r;
}

}  // namespace

CoarseField local_density(const MicroState& s, double eps) {
  const int n = s.n;
  const int r = window_radius(n, eps);
  std::vector<double> eta(s.occupancy.size());
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = s.occupancy[i] == kEmptySite ? 0.0 : 1.0;
  // Integer counts are summed exactly, so dividing once keeps results exact.
  std::vector<double> counts = box_sum(eta, n, r);
  const double inv = 1.0 / ((2.0 * r + 1) * (2.0 * r + 1));
  for (double& c : counts) c = std::round(c) * inv;
  return {n, eps, r, std::move(counts), {}};
}

CoarseField local_polarisation(const MicroState& s, double eps) {
  const int n = s.n;
  const int r = window_radius(n, eps);
  std::vector<double> c(s.occupancy.size(), 0.0), sn(s.occupancy.size(), 0.0);
  for (std::size_t p = 0; p < s.sites.size(); ++p) {
    c[s.sites[p]] = std::cos(s.angles[p]);
    sn[s.sites[p]] = std::sin(s.angles[p]);
  }
  const double inv = 1.0 / ((2.0 * r + 1) * (2.0 * r + 1));
  CoarseField f{n, eps, r, box_sum(c, n, r), box_sum(sn, n, r)};
  for (double& v : f.values) v *= inv;
  for (double& v : f.values2) v *= inv;
  return f;
}

double phi_order(const MicroState& s) {
  const int n = s.n;
  if (n == 0) return 0.0;
  // Per-row and per-column counts, then one Fourier sum each.
  std::vector<long> rows(n, 0), cols(n, 0);
  for (std::int32_t site : s.sites) {
    ++rows[site / n];
    ++cols[site % n];
  }
  std::complex<double> a1{}, a2{};
  for (int k = 0; k < n; ++k) {
    const std::complex<double> w = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    a1 += static_cast<double>(rows[k]) * w;
    a2 += static_cast<double>(cols[k]) * w;
  }
  const double inv = 1.0 / (static_cast<double>(n) * n);
  return std::abs(a1) * inv + std::abs(a2) * inv;
}

CoarseField coarse_macro_density(const std::vector<double>& rho, int n, double eps) {
  if (rho.size() != static_cast<std::size_t>(n) * n) throw InvalidParameter("coarse_macro_density: size mismatch");
  if (!(eps > 0.0)) throw InvalidParameter("coarse_macro_density: eps must be positive");
  const int m = static_cast<int>(std::floor(eps * n + 1e-9));
  if (m < 1) throw InvalidParameter("coarse_macro_density: eps smaller than one cell");
  if (2 * m + 1 > n) throw InvalidParameter("coarse_macro_density: window wider than the grid");
  // Cell centres within distance m-1 are fully covered, those at distance m
  // are half covered: weights sum to 2m cells per axis.
  std::vector<double> w(2 * m + 1, 1.0);
  w.front() = w.back() = 0.5;
  auto wrap = [n](int k) { return ((k % n) + n) % n; };
  std::vector<double> tmp(rho.size()), out(rho.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int d = -m; d <= m; ++d) s += w[d + m] * rho[static_cast<std::size_t>(i) * n + wrap(j + d)];
      tmp[static_cast<std::size_t>(i) * n + j] = s;
    }
  const double norm = 1.0 / (4.0 * m * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int d = -m; d <= m; ++d) s += w[d + m] * tmp[static_cast<std::size_t>(wrap(i + d)) * n + j];
      out[static_cast<std::size_t>(i) * n + j] = s * norm;
    }
  return {n, static_cast<double>(m) / n, m, std::move(out), {}};
}

std::vector<double> uniform_edges(int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw InvalidParameter("uniform_edges: need bins >= 1 and hi > lo");
  std::vector<double> e(bins + 1);
  for (int b = 0; b <= bins; ++b) e[b] = lo + (hi - lo) * b / bins;
  e.back() = hi;
  return e;
}

DensityHistogram histogram(const std::vector<std::vector<double>>& samples, const std::vector<double>& edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw InvalidParameter("histogram: edges must be strictly increasing");
  std::vector<double> counts(edges.size() - 1, 0.0);
  std::size_t total = 0;
  const double lo = edges.front(), hi = edges.back();
  // Absorb coarse-graining roundoff just outside [lo, hi].
  constexpr double kSlack = 1e-9;
  for (const auto& field : samples)
    for (double v : field) {
      if (!(v >= lo - kSlack && v <= hi + kSlack)) throw DomainError("histogram: value outside the bin range");
      const double c = std::clamp(v, lo, hi);
      auto it = std::upper_bound(edges.begin(), edges.end(), c);
      std::size_t bin = static_cast<std::size_t>(it - edges.begin());
      bin = bin == 0 ? 0 : bin - 1;
      if (bin >= counts.size()) bin = counts.size() - 1;
      counts[bin] += 1.0;
      ++total;
    }
  if (total == 0) throw InvalidParameter("histogram: empty input");
  for (double& c : counts) c /= static_cast<double>(total);
  return {edges, std::move(counts)};
}

DensityHistogram histogram(const std::vector<CoarseField>& fields, const std::vector<double>& edges) {
  std::vector<std::vector<double>> samples;
  samples.reserve(fields.size());
  for (const auto& f : fields) samples.push_back(f.values);
  return histogram(samples, edges);
}

double histogram_distance(const DensityHistogram& a, const DensityHistogram& b) {
  if (a.edges != b.edges || a.probability.size() != b.probability.size())
    throw InvalidParameter("histogram_distance: bin edges differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.probability.size(); ++i) d += std::abs(a.probability[i] - b.probability[i]);
  return 0.5 * d;
}

Bimodality find_peaks(const DensityHistogram& h, double split) {
  Bimodality out;
  const auto& p = h.probability;
  const std::size_t nb = p.size();
  double best_lo = 0.0, best_hi = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double left = b == 0 ? -1.0 : p[b - 1];
    const double right = b + 1 == nb ? -1.0 : p[b + 1];
    if (!(p[b] > 0.0 && p[b] >= left && p[b] >= right)) continue;
    const double centre = 0.5 * (h.edges[b] + h.edges[b + 1]);
    if (centre < split) {
      if (p[b] > best_lo) {
        best_lo = p[b];
        out.dilute_peak = centre;
      }
    } else if (p[b] > best_hi) {
      best_hi = p[b];
      out.dense_peak = centre;
    }
  }
  return out;
}

}  // namespace alg
