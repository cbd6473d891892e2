#pragma once

// Linear stability of the homogeneous state f = phi/2pi against a plane-wave
// perturbation exp(lambda t + i omega x1) sum_k A_k cos(k theta).
//
// The angular harmonics 0..n are kept, so the truncated operator is a
// complex (n+1)x(n+1) matrix: a 2x2 block coupling density and polarisation,
// followed by the tridiagonal three-term recurrence for k >= 2.

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "alg/params.hpp"

namespace alg {

enum class OrientationDynamics { diffusion, run_and_tumble };

struct StabilityProblem {
  double phi = 0.5;
  PhysicalParams params;
  int wave_index = 1;  // omega = 2 pi * wave_index
  int n = 40;          // highest angular harmonic retained
  OrientationDynamics dynamics = OrientationDynamics::diffusion;

  double omega() const;
  void validate() const;
};

struct StabilityResult {
  std::complex<double> lambda_max;
  /// A_0..A_n, scaled so that Re[sum_k A_k cos(k theta) e^{i omega x1}] has
  /// unit L2 norm on the torus times the circle, with A_0 real and >= 0.
  std::vector<std::complex<double>> coefficients;
  double truncation_error = 0.0;
  int n_used = 0;
  double residual = 0.0;  // ||M v - lambda v||_inf for the unnormalised eigenvector
};

Eigen::MatrixXcd build_matrix(const StabilityProblem& p);

/// Dense eigensolve of the truncated matrix; returns the eigenpair with the
/// largest real part. Throws NumericalAbort if the QR iteration fails.
StabilityResult leading_eigenpair(const StabilityProblem& p);

/// Squared L2 norm of the real perturbation field built from A_0..A_n.
double perturbation_norm_squared(const std::vector<std::complex<double>>& coefficients);

struct BoundaryOptions {
  double ell = 0.5;
  double spatial_diffusion = 1.0;
  int wave_index = 1;
  int n = 40;
  OrientationDynamics dynamics = OrientationDynamics::diffusion;
  double pe_lo = 0.0;
  double pe_hi = 40.0;
  double pe_tol = 1e-3;
};

struct BoundaryResult {
  std::optional<double> pe;       // critical Peclet number, if the bracket contains one
  double truncation_error = 0.0;  // at the returned Pe
  std::string diagnostic;         // set when pe is empty or several crossings were seen
};

/// Lowest Pe in the bracket where Re lambda_max changes sign from negative to
/// nonnegative: integer pre-scan, then bisection to pe_tol.
BoundaryResult boundary_pe(double phi, const BoundaryOptions& opts = {});

/// Sharp-interface spinodal Pe*(0) = sqrt(-1 / ((1-phi)(d_s + phi d_s'))),
/// or nothing when d_s + phi d_s' >= 0. Throws DomainError outside (0,1).
/// Note: boundary_pe at ell -> 0 tends to sqrt(2) times this value, the root
/// of det W = 0 for the 2x2 density/polarisation block.
std::optional<double> spinodal_pe(double phi);

/// Root of d_s(phi) + phi d_s'(phi) in (0,1), the low-density end of the spinodal.
double spinodal_threshold();

}  // namespace alg
