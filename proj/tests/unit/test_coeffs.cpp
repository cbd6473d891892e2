#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "alg/coeffs.hpp"
#include "alg/error.hpp"
#include "oracles.hpp"

using namespace alg;

TEST_SUITE("coeffs") {
  TEST_CASE("self-diffusion endpoints and reference values") {
    CHECK(ds(0.0) == 1.0);
    CHECK(ds(1.0) == 0.0);
    CHECK(std::abs(ds(0.5) - 0.362018) < 1e-6);
    CHECK(std::abs(ds(0.5) - oracle::self_diffusion(0.5)) < 1e-15);
    CHECK(std::abs(ds(0.7) - 0.185680) < 1e-6);
  }

  TEST_CASE("derivative reference values") {
    CHECK(ds_prime(0.0) == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-15));
    const double a = poly::alpha, b = poly::beta;
    CHECK(ds_prime(1.0) == doctest::Approx(-(1 - a + b)).epsilon(1e-15));
    CHECK(std::abs(ds_prime(1.0) + 0.466941) < 2e-6);
    CHECK(std::abs(ds_prime(1.0) + static_cast<double>(1 - oracle::alpha_ld() + oracle::beta_ld())) < 1e-15);
    CHECK(std::abs(ds_prime(0.7) + 0.774323) < 1e-6);
  }

  TEST_CASE("cross diffusion and polar coupling limits") {
    CHECK(cross_diffusion(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(polar_coupling(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cross_diffusion(0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(polar_coupling(0.0) == doctest::Approx(std::numbers::pi / 2 - 1).epsilon(1e-15));
    for (double r : {1e-3, 0.1, 0.5, 0.9}) CHECK(cross_diffusion(r) == doctest::Approx(oracle::cal_d(r)).epsilon(1e-13));
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(ds(-0.1), DomainError);
    CHECK_THROWS_AS(ds(1.1), DomainError);
    CHECK_THROWS_AS(ds_prime(NAN), DomainError);
    CHECK_THROWS_AS(cross_diffusion(2.0), DomainError);
    CHECK_THROWS_AS(TransportCoefficients::standard().q(-1e-3), DomainError);
  }

  TEST_CASE("self-diffusion strictly decreasing") {
    double prev = ds(0.0);
    for (int i = 1; i <= 10000; ++i) {
      const double cur = ds(i / 10000.0);
      REQUIRE(cur < prev);
      prev = cur;
    }
  }

  TEST_CASE("derivative matches central differences") {
    double worst = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double x = i / 1000.0;
      const double fd = oracle::central_difference(oracle::self_diffusion, x, 1e-6);
      worst = std::max(worst, std::abs(fd - ds_prime(x)));
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("Q anchored at zero and against an independent quadrature") {
    const auto& c = TransportCoefficients::standard();
    CHECK(c.q(0.0) == 0.0);
    CHECK(std::abs(c.q(0.5) - oracle::q_difference(0.0, 0.5)) < 1e-8);

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.0, 0.999);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      worst = std::max(worst, std::abs((c.q(b) - c.q(a)) - oracle::q_difference(a, b)));
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("Q grows like -log(1-rho)/|ds'(1)| near one") {
    const auto& c = TransportCoefficients::standard();
    std::vector<double> x, y;
    for (int e = 4; e <= 8; ++e) {
      const double rho = 1.0 - std::pow(10.0, -e);
      x.push_back(-std::log1p(-rho));
      y.push_back(c.q(rho));
    }
    CHECK(oracle::fitted_slope(x, y) == doctest::Approx(1.0 / 0.466941).epsilon(1e-4));
  }

  TEST_CASE("Q clamps above the threshold and is monotone") {
    const auto& c = TransportCoefficients::standard();
    CHECK(c.q(1.0) == c.q(c.rho_max()));
    CHECK(std::isfinite(c.q(1.0)));
    const auto v = c.table_values();
    for (std::size_t i = 1; i < v.size(); ++i) REQUIRE(v[i] > v[i - 1]);
    const auto x = c.table_nodes();
    for (std::size_t i = 1; i < x.size() && x[i] <= 0.99; ++i) REQUIRE(x[i] - x[i - 1] <= 1e-4 + 1e-15);
  }

  TEST_CASE("spinodal factor changes sign once") {
    int changes = 0;
    double prev = ds(0.0);
    for (int i = 1; i < 10000; ++i) {
      const double r = i / 10000.0;
      const double g = ds(r) + r * ds_prime(r);
      if ((g < 0) != (prev < 0)) ++changes;
      prev = g;
    }
    CHECK(changes == 1);
  }

  TEST_CASE("Einstein relation") {
    const int n = 64;
    const double dtheta = 2 * std::numbers::pi / n;
    SUBCASE("uniform") {
      std::vector<double> f(n, 0.5 / (2 * std::numbers::pi));
      CHECK(einstein_residual(f, 0.5) <= 1e-10);
    }
    SUBCASE("single bin") {
      std::vector<double> f(n, 0.0);
      f[5] = 0.4 / dtheta;
      CHECK(einstein_residual(f, 0.4) <= 1e-10);
    }
    SUBCASE("empty") {
      std::vector<double> f(n, 0.0);
      CHECK(einstein_residual(f, 0.0) == 0.0);
    }
    SUBCASE("random") {
      std::mt19937_64 rng(7);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double worst = 0.0;
      for (int t = 0; t < 100; ++t) {
        const double rho = 0.01 + 0.98 * u(rng);
        std::vector<double> f(n);
        double sum = 0.0;
        for (double& v : f) sum += (v = u(rng));
        for (double& v : f) v *= rho / (sum * dtheta);
        worst = std::max(worst, einstein_residual(f, rho));
      }
      CHECK(worst <= 1e-10);
    }
    SUBCASE("rejects mismatched mass") {
      std::vector<double> f(n, 0.1);
      CHECK_THROWS(einstein_residual(f, 0.2));
    }
  }
}
