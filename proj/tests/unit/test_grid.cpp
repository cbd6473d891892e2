#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "alg/error.hpp"
#include "alg/grid.hpp"

using namespace alg;

TEST_SUITE("grid") {
  TEST_CASE("counts and spacings") {
    const Grid g(8, 6, 16);
    CHECK(g.dx1() == 1.0 / 8);
    CHECK(g.dx2() == 1.0 / 6);
    CHECK(g.dtheta() == doctest::Approx(2 * std::numbers::pi / 16));
    CHECK(g.cells() == 8u * 6 * 16);
    CHECK(g.index(1, 2, 3) == (1u * 6 + 2) * 16 + 3);
    CHECK_THROWS_AS(Grid(3, 8, 8), InvalidParameter);
    CHECK_THROWS_AS(Grid(8, 8, 2), InvalidParameter);
  }

  TEST_CASE("moments of simple angular profiles") {
    const Grid g(4, 4, 16);
    const double phi = 0.6;
    SUBCASE("uniform") {
      const OrientationField f(g, phi / (2 * std::numbers::pi));
      const Moments m = moments(f);
      for (std::size_t c = 0; c < g.columns(); ++c) {
        CHECK(m.rho[c] == doctest::Approx(phi).epsilon(1e-15));
        CHECK(std::abs(m.p1[c]) < 1e-15);
        CHECK(std::abs(m.p2[c]) < 1e-15);
      }
    }
    SUBCASE("single angular bin") {
      OrientationField f(g);
      const int k = 3;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) f.at(i, j, k) = phi / g.dtheta();
      const Moments m = moments(f);
      CHECK(m.rho[5] == doctest::Approx(phi));
      CHECK(m.p1[5] == doctest::Approx(phi * std::cos(k * g.dtheta())));
      CHECK(m.p2[5] == doctest::Approx(phi * std::sin(k * g.dtheta())));
    }
    SUBCASE("first harmonic") {
      OrientationField f(g);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 16; ++k) f.at(i, j, k) = phi / (2 * std::numbers::pi) * (1 + std::cos(k * g.dtheta()));
      const Moments m = moments(f);
      CHECK(std::abs(std::hypot(m.p1[0], m.p2[0]) - phi / 2) <= 1e-12);
      CHECK(m.rho[0] == doctest::Approx(phi).epsilon(1e-14));
    }
  }

  TEST_CASE("polarisation bounded by density") {
    const Grid g(6, 5, 12);
    OrientationField f(g);
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> e(1.0);
    for (double& v : f.values) v = e(rng);
    const Moments m = moments(f);
    for (std::size_t c = 0; c < g.columns(); ++c) CHECK(std::hypot(m.p1[c], m.p2[c]) <= m.rho[c] * (1 + 1e-15));
  }

  TEST_CASE("discrete norm") {
    const Grid g(8, 8, 8);
    OrientationField f(g, 0.2);
    CHECK(norm_l2tilde(f, 0.2) == 0.0);
    for (double& v : f.values) v = 0.2 + 0.01;
    CHECK(norm_l2tilde(f, 0.2) == doctest::Approx(0.01 * std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double& v : f.values) v = 0.2 + n(rng);
    const double base = norm_l2tilde(f, 0.2);
    for (double& v : f.values) v = 0.2 + 3 * (v - 0.2);
    CHECK(norm_l2tilde(f, 0.2) == doctest::Approx(3 * base).epsilon(1e-13));
  }

  TEST_CASE("free energy of the uniform state") {
    const Grid g(4, 4, 8);
    const double phi = 0.35;
    const OrientationField f(g, phi / (2 * std::numbers::pi));
    CHECK(free_energy(f) == doctest::Approx((1 - phi) * std::log(1 - phi) + phi * std::log(phi)).epsilon(1e-13));
    CHECK(f.mass() == doctest::Approx(phi).epsilon(1e-14));
  }
}
