#pragma once

// Model parameters on the unit torus, in physical and dimensionless form.

namespace alg {

/// Physical rates of the lattice gas.
struct PhysicalParams {
  double spatial_diffusion = 1.0;  // D_E, length^2/time
  double speed = 0.0;              // v_0, length/time
  double angular_diffusion = 1.0;  // D_O, 1/time

  void validate() const;
  bool operator==(const PhysicalParams&) const = default;
};

/// Volume fraction, Peclet number and diffusive length scale.
struct DimensionlessParams {
  double phi = 0.5;
  double peclet = 0.0;
  double ell = 0.5;

  void validate() const;
  bool operator==(const DimensionlessParams&) const = default;
};

/// D_O = D_E / ell^2 and v_0 = Pe * D_E / ell. Throws InvalidParameter.
PhysicalParams to_physical(const DimensionlessParams& d, double spatial_diffusion = 1.0);

/// ell = sqrt(D_E / D_O), Pe = v_0 / sqrt(D_E * D_O). Throws InvalidParameter.
DimensionlessParams to_dimensionless(const PhysicalParams& p, double phi);

}  // namespace alg
