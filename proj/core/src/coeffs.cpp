#include "alg/coeffs.hpp"

#include <Eigen/Dense>
#include <algorithm>
// boost's interpolators call isnan unqualified; make it visible at global scope first.
#include <math.h>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "alg/error.hpp"

namespace alg {

namespace {

void check_fraction(double rho, const char* what) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw DomainError(std::string(what) + ": density " + std::to_string(rho) + " outside [0,1]");
}

double q_integrand(double x) { return poly::cross_diffusion(x) / poly::ds(x); }

// Near rho = 1, substitute u = -log(1 - rho): the integrand times 1 - rho is
// smooth and the simple pole disappears.
double q_integrand_log(double u) {
  const double x = -std::expm1(-u);
  return poly::cross_diffusion(x) / (1.0 - poly::alpha * x + poly::beta * x * x);
}

// Uniform spacing 1e-4 up to 0.99, then geometric refinement towards 1 so
// the logarithmic blow-up of Q stays resolved down to 1 - rho = 1e-9.
constexpr double kLogBreak = 0.99;

std::vector<double> table_grid(double rho_max) {
  std::vector<double> x;
  constexpr int kUniform = 9900;
  constexpr double kBreak = kLogBreak;
  const double stop = std::min(rho_max, kBreak);
  for (int i = 0; i <= kUniform; ++i) {
    const double xi = kBreak * i / kUniform;
    if (xi >= stop) break;
    x.push_back(xi);
  }
  x.push_back(stop);
  if (rho_max > kBreak) {
    constexpr int kPerDecade = 200;
    const double gap0 = 1.0 - kBreak;
    for (int j = 1;; ++j) {
      const double xj = 1.0 - gap0 * std::pow(10.0, -static_cast<double>(j) / kPerDecade);
      if (xj >= rho_max) break;
      x.push_back(xj);
    }
    if (x.back() < rho_max) x.push_back(rho_max);
  }
  return x;
}

}  // namespace

double ds(double rho) {
  check_fraction(rho, "ds");
  return poly::ds(rho);
}

double ds_prime(double rho) {
  check_fraction(rho, "ds_prime");
  return poly::ds_prime(rho);
}

double cross_diffusion(double rho) {
  check_fraction(rho, "cross_diffusion");
  return poly::cross_diffusion(rho);
}

double polar_coupling(double rho) {
  check_fraction(rho, "polar_coupling");
  return poly::polar_coupling(rho);
}

struct TransportCoefficients::Table {
  std::vector<double> nodes;
  std::vector<double> values;
  boost::math::interpolators::cubic_hermite<std::vector<double>> spline;

  static Table build(double rho_max) {
    using boost::math::quadrature::gauss_kronrod;
    std::vector<double> x = table_grid(rho_max);
    std::vector<double> y(x.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      double err = 0.0;
      const double piece =
          x[i - 1] < kLogBreak
              ? gauss_kronrod<double, 31>::integrate(q_integrand, x[i - 1], x[i], 0, 0.0, &err)
              : gauss_kronrod<double, 31>::integrate(q_integrand_log, -std::log1p(-x[i - 1]), -std::log1p(-x[i]), 0,
                                                     0.0, &err);
      // The Kronrod estimate is pessimistic by several orders for this smooth
      // integrand; a relative bound still catches a broken panel.
      if (err > 1e-10 * piece) throw NumericalAbort("Q table: quadrature error too large near rho=" + std::to_string(x[i]));
      acc += piece;
      y[i] = acc;
    }
    // Slopes are known exactly (Q' = D/ds), so Hermite interpolation with the
    // true derivatives beats pchip's finite-difference slopes by two orders
    // near the pole. Still check the Fritsch-Carlson monotonicity region.
    std::vector<double> dy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dy[i] = q_integrand(x[i]);
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double secant = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
      const double a = dy[i - 1] / secant, b = dy[i] / secant;
      if (!(secant > 0.0) || a * a + b * b > 9.0)
        throw NumericalAbort("Q table: Hermite interpolant not monotone near rho=" + std::to_string(x[i]));
    }
    std::vector<double> xs = x;
    std::vector<double> ys = y;
    return Table{std::move(x), std::move(y),
                 boost::math::interpolators::cubic_hermite<std::vector<double>>(std::move(xs), std::move(ys),
                                                                                std::move(dy))};
  }
};

TransportCoefficients::TransportCoefficients(double rho_max) : rho_max_(rho_max) {
  if (!(rho_max > 0.5 && rho_max < 1.0)) throw InvalidParameter("rho_max must lie in (0.5, 1)");
  table_ = std::make_shared<const Table>(Table::build(rho_max));
}

const TransportCoefficients& TransportCoefficients::standard() {
  static const TransportCoefficients instance;
  return instance;
}

double TransportCoefficients::q(double rho) const {
  if (!(rho >= 0.0)) throw DomainError("Q: negative density " + std::to_string(rho));
  return q_unchecked(rho);
}

double TransportCoefficients::q_unchecked(double rho) const {
  if (rho <= 0.0) return 0.0;
  return table_->spline(std::min(rho, rho_max_));
}

std::span<const double> TransportCoefficients::table_nodes() const { return table_->nodes; }
std::span<const double> TransportCoefficients::table_values() const { return table_->values; }

double einstein_residual(std::span<const double> f, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("einstein_residual: rho outside [0,1]");
  const auto n = static_cast<Eigen::Index>(f.size());
  if (n == 0) throw InvalidParameter("einstein_residual: empty angular density");
  for (double v : f)
    if (!(v >= 0.0)) throw DomainError("einstein_residual: negative angular density");

  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double d = poly::ds(rho);
  const double cd = poly::cross_diffusion(rho);
  const double s = poly::polar_coupling(rho);
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), n);
  if (std::abs(dtheta * fv.sum() - rho) > 1e-9)
    throw InvalidParameter("einstein_residual: rho does not match the mass of f");

  // Row index theta, column index theta'; entries are densities in dtheta'.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd diffusion = cd * fv * ones.transpose();
  diffusion.diagonal().array() += d / dtheta;
  Eigen::MatrixXd chi = -fv * fv.transpose();
  chi.diagonal() += fv / dtheta;
  Eigen::MatrixXd mobility = s * fv * fv.transpose();
  mobility.diagonal() += d * fv / dtheta;

  const Eigen::MatrixXd composed = dtheta * diffusion * chi;
  return (mobility - composed).cwiseAbs().maxCoeff();
}

}  // namespace alg
