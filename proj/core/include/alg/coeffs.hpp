#pragma once

// Self-diffusion coefficient of the symmetric exclusion process (polynomial
// approximation, exact to first order at both ends) and the transport
// coefficients of the hydrodynamic equation built from it.

#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace alg {

namespace poly {

inline constexpr double alpha = std::numbers::pi / 2.0 - 1.0;
inline constexpr double beta = alpha * (2.0 * alpha - 1.0) / (2.0 * alpha + 1.0);

// Unchecked evaluators for hot loops. Callers guarantee rho in [0,1].
constexpr double ds(double rho) { return (1.0 - rho) * (1.0 - alpha * rho + beta * rho * rho); }
constexpr double ds_prime(double rho) {
  return -(1.0 - alpha * rho + beta * rho * rho) + (1.0 - rho) * (-alpha + 2.0 * beta * rho);
}
// (1 - ds)/rho expanded, so rho = 0 needs no special case.
constexpr double cross_diffusion(double rho) { return (1.0 + alpha) - (alpha + beta) * rho + beta * rho * rho; }
constexpr double polar_coupling(double rho) { return cross_diffusion(rho) - 1.0; }

}  // namespace poly

/// d_s(rho) = (1 - rho)(1 - alpha rho + beta rho^2). Throws DomainError outside [0,1].
double ds(double rho);
double ds_prime(double rho);
/// D(rho) = (1 - d_s)/rho, continuous at 0 with value pi/2.
double cross_diffusion(double rho);
/// s(rho) = D(rho) - 1.
double polar_coupling(double rho);

/// Immutable evaluator bundle. Holds the tabulated antiderivative
/// Q(rho) = int_0^rho D(x)/d_s(x) dx used by the finite-volume velocities.
class TransportCoefficients {
 public:
  static constexpr double kDefaultRhoMax = 1.0 - 1e-9;

  explicit TransportCoefficients(double rho_max = kDefaultRhoMax);

  /// Process-wide instance with the default clamp.
  static const TransportCoefficients& standard();

  double rho_max() const noexcept { return rho_max_; }

  /// Q(rho); inputs above rho_max are clamped. Throws DomainError for rho < 0.
  double q(double rho) const;
  /// Q without the domain check; rho must be >= 0.
  double q_unchecked(double rho) const;

  std::span<const double> table_nodes() const;
  std::span<const double> table_values() const;

 private:
  struct Table;
  double rho_max_;
  std::shared_ptr<const Table> table_;
};

/// Max-abs entrywise residual of sigma - <D, chi> for the angular density f
/// sampled on f.size() uniform bins of [0, 2pi). Dirac masses become
/// diagonal entries divided by the bin width.
double einstein_residual(std::span<const double> f, double rho);

}  // namespace alg
