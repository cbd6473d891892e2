#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "alg/error.hpp"
#include "alg/observables.hpp"
#include "oracles.hpp"

using namespace alg;

namespace {

MicroState from_occupancy(int n, const std::vector<int>& occupied_sites, const std::vector<double>& angles) {
  MicroState s;
  s.n = n;
  s.occupancy.assign(static_cast<std::size_t>(n) * n, kEmptySite);
  for (std::size_t p = 0; p < occupied_sites.size(); ++p) {
    s.occupancy[occupied_sites[p]] = static_cast<std::int32_t>(p);
    s.sites.push_back(occupied_sites[p]);
    s.angles.push_back(angles.empty() ? 0.0 : angles[p]);
  }
  return s;
}

MicroState translated(const MicroState& s, int d1, int d2) {
  std::vector<int> sites;
  for (auto site : s.sites) sites.push_back(((s.z1(site) + d1) % s.n) * s.n + (s.z2(site) + d2) % s.n);
  return from_occupancy(s.n, sites, s.angles);
}

}  // namespace

TEST_SUITE("observables") {
  TEST_CASE("local density of trivial states") {
    const auto empty = local_density(init_product(32, 0.0, make_stream(1, 0)), 1.0 / 16);
    CHECK(empty.radius == 2);
    for (double v : empty.values) CHECK(v == 0.0);
    const auto full = local_density(init_product(32, 1.0, make_stream(1, 0)), 1.0 / 16);
    for (double v : full.values) CHECK(v == 1.0);
  }

  TEST_CASE("single particle covers a five by five box") {
    const int n = 32;
    const auto s = from_occupancy(n, {10 * n + 31}, {});
    const auto f = local_density(s, 1.0 / 16);
    int covered = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int di = std::min(std::abs(i - 10), n - std::abs(i - 10));
        const int dj = std::min(std::abs(j - 31), n - std::abs(j - 31));
        const double expect = (di <= 2 && dj <= 2) ? 1.0 / 25 : 0.0;
        CHECK(f.values[i * n + j] == expect);
        covered += expect > 0;
      }
    CHECK(covered == 25);
  }

  TEST_CASE("sliding window equals direct loops") {
    for (int n : {16, 32, 64})
      for (double eps : {1.0 / 16, 1.0 / 8, 0.1}) {
        const auto s = init_product(n, 0.45, make_stream(n, static_cast<std::uint64_t>(eps * 1000)));
        std::vector<double> occ(s.occupancy.size());
        for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = s.occupancy[i] == kEmptySite ? 0.0 : 1.0;
        const auto f = local_density(s, eps);
        const int r = static_cast<int>(std::floor(eps * n + 1e-9));
        CHECK(f.radius == r);
        // Both sides are an integer count divided by the same box size.
        const auto ref = oracle::box_average(occ, n, r);
        for (std::size_t i = 0; i < ref.size(); ++i)
          CHECK(std::round(f.values[i] * (2 * r + 1) * (2 * r + 1)) ==
                std::round(ref[i] * (2 * r + 1) * (2 * r + 1)));
        const double mean = std::accumulate(f.values.begin(), f.values.end(), 0.0) / (n * n);
        CHECK(mean == doctest::Approx(static_cast<double>(s.particle_count()) / (n * n)).epsilon(1e-14));
      }
  }

  TEST_CASE("window must cover at least one neighbour") {
    const auto s = init_product(16, 0.5, make_stream(1, 0));
    CHECK_THROWS_AS(local_density(s, 1.0 / 32), InvalidParameter);
    CHECK_THROWS_AS(local_density(s, 0.6), InvalidParameter);
  }

  TEST_CASE("local polarisation") {
    const int n = 32;
    std::vector<int> all(n * n);
    std::iota(all.begin(), all.end(), 0);
    const double theta = 1.1;
    const auto aligned = local_polarisation(from_occupancy(n, all, std::vector<double>(n * n, theta)), 1.0 / 16);
    for (std::size_t i = 0; i < aligned.values.size(); ++i) {
      CHECK(aligned.values[i] == doctest::Approx(std::cos(theta)).epsilon(1e-14));
      CHECK(aligned.values2[i] == doctest::Approx(std::sin(theta)).epsilon(1e-14));
    }
    const auto none = local_polarisation(init_product(n, 0.0, make_stream(1, 0)), 1.0 / 16);
    for (double v : none.values) CHECK(v == 0.0);

    // Random angles: RMS |p| ~ sqrt(rho) / (2r+1), and |p| <= local density.
    for (int r : {2, 4}) {
      const double eps = static_cast<double>(r) / n;
      double acc = 0.0;
      int samples = 0;
      for (int draw = 0; draw < 100; ++draw) {
        const auto s = init_product(n, 0.5, make_stream(99, draw));
        const auto p = local_polarisation(s, eps);
        const auto d = local_density(s, eps);
        for (std::size_t i = 0; i < p.values.size(); ++i) {
          const double mag = std::hypot(p.values[i], p.values2[i]);
          REQUIRE(mag <= d.values[i] + 1e-12);
          acc += mag * mag;
          ++samples;
        }
      }
      const double rms = std::sqrt(acc / samples);
      CHECK(rms == doctest::Approx(std::sqrt(0.5 / 2.0) / (2 * r + 1)).epsilon(0.05));
    }
  }

  TEST_CASE("order parameter of simple states") {
    std::vector<int> all(16 * 16);
    std::iota(all.begin(), all.end(), 0);
    CHECK(phi_order(from_occupancy(16, all, {})) < 1e-14);
    CHECK(phi_order(from_occupancy(16, {37}, {})) == doctest::Approx(2.0 / 256).epsilon(1e-14));

    double prev_gap = INFINITY;
    for (int n : {16, 64, 256}) {
      std::vector<int> stripe;
      for (int z1 = 1; z1 <= n / 2; ++z1)
        for (int z2 = 0; z2 < n; ++z2) stripe.push_back(z1 * n + z2);
      const double gap = std::abs(phi_order(from_occupancy(n, stripe, {})) - 1.0 / std::numbers::pi);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap < 1e-4);
  }

  TEST_CASE("order parameter is translation invariant") {
    const auto s = init_product(32, 0.3, make_stream(5, 0));
    const double base = phi_order(s);
    for (auto [a, b] : {std::pair{1, 0}, std::pair{0, 7}, std::pair{13, 29}})
      CHECK(std::abs(phi_order(translated(s, a, b)) - base) <= 1e-14);
  }

  TEST_CASE("order parameter of random states scales as 1/N") {
    std::vector<double> means;
    for (int n : {32, 64, 128}) {
      double acc = 0.0;
      for (int d = 0; d < 100; ++d) acc += phi_order(init_product(n, 0.5, make_stream(n, d)));
      means.push_back(acc / 100);
    }
    CHECK(means[0] / means[1] == doctest::Approx(2.0).epsilon(0.3));
    CHECK(means[1] / means[2] == doctest::Approx(2.0).epsilon(0.3));
  }

  TEST_CASE("macroscopic coarse graining") {
    const int n = 32;
    SUBCASE("constant") {
      const auto f = coarse_macro_density(std::vector<double>(n * n, 0.4), n, 1.0 / 8);
      for (double v : f.values) CHECK(v == doctest::Approx(0.4).epsilon(1e-15));
      CHECK(f.radius == 4);
      CHECK(f.eps == 0.125);
    }
    SUBCASE("mass preserving") {
      std::vector<double> rho(n * n);
      auto rng = make_stream(1, 1);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (double& v : rho) v = u(rng);
      const auto f = coarse_macro_density(rho, n, 1.0 / 16);
      const double a = std::accumulate(rho.begin(), rho.end(), 0.0), b = std::accumulate(f.values.begin(), f.values.end(), 0.0);
      CHECK(std::abs(a - b) / (n * n) <= 1e-12);
    }
    SUBCASE("spike spreads over the window") {
      std::vector<double> rho(n * n, 0.0);
      rho[5 * n + 6] = 1.0;
      const int m = 2;
      const auto f = coarse_macro_density(rho, n, static_cast<double>(m) / n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const int di = std::min(std::abs(i - 5), n - std::abs(i - 5));
          const int dj = std::min(std::abs(j - 6), n - std::abs(j - 6));
          const double wi = di < m ? 1.0 : di == m ? 0.5 : 0.0;
          const double wj = dj < m ? 1.0 : dj == m ? 0.5 : 0.0;
          CHECK(f.values[i * n + j] == doctest::Approx(wi * wj / (4.0 * m * m)).epsilon(1e-15));
        }
    }
    SUBCASE("eps rounded down to whole cells") {
      const auto f = coarse_macro_density(std::vector<double>(n * n, 0.1), n, 0.1);
      CHECK(f.radius == 3);
      CHECK(f.eps == 3.0 / 32);
    }
  }

  TEST_CASE("histograms") {
    const auto edges = uniform_edges();
    REQUIRE(edges.size() == 51u);
    const auto h = histogram(std::vector<std::vector<double>>{std::vector<double>(100, 0.31)}, edges);
    CHECK(std::accumulate(h.probability.begin(), h.probability.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.probability[15] == 1.0);
    const auto top = histogram(std::vector<std::vector<double>>{{1.0, 0.0}}, edges);
    CHECK(top.probability.back() == 0.5);
    CHECK(top.probability.front() == 0.5);
    CHECK_THROWS_AS(histogram(std::vector<std::vector<double>>{}, edges), InvalidParameter);
    CHECK_THROWS_AS(histogram(std::vector<std::vector<double>>{{1.5}}, edges), DomainError);

    CoarseField f{4, 0.25, 1, std::vector<double>(16, 0.95), {}};
    CHECK(histogram(std::vector<CoarseField>{f, f}, edges).probability[47] == 1.0);
  }

  TEST_CASE("histogram distance") {
    const auto two = uniform_edges(2);
    const auto a = histogram(std::vector<std::vector<double>>{{0.1}}, two);
    const auto b = histogram(std::vector<std::vector<double>>{{0.9}}, two);
    const auto u = histogram(std::vector<std::vector<double>>{{0.1, 0.9}}, two);
    CHECK(histogram_distance(a, a) == 0.0);
    CHECK(histogram_distance(a, b) == 1.0);
    CHECK(histogram_distance(a, u) == 0.5);
    const auto other = histogram(std::vector<std::vector<double>>{{0.1}}, uniform_edges(3));
    CHECK_THROWS_AS(histogram_distance(a, other), InvalidParameter);
  }

  TEST_CASE("peaks") {
    DensityHistogram h{uniform_edges(10), {0.05, 0.3, 0.1, 0.02, 0.01, 0.02, 0.04, 0.06, 0.1, 0.3}};
    const auto b = find_peaks(h);
    REQUIRE(b.bimodal());
    CHECK(*b.dilute_peak == doctest::Approx(0.15));
    CHECK(*b.dense_peak == doctest::Approx(0.95));
    DensityHistogram one{uniform_edges(4), {0.0, 0.0, 1.0, 0.0}};
    CHECK_FALSE(find_peaks(one).bimodal());
  }
}
