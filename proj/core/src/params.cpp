#include "alg/params.hpp"

#include <cmath>
#include <string>

#include "alg/error.hpp"

namespace alg {

void PhysicalParams::validate() const {
  if (!std::isfinite(spatial_diffusion) || !std::isfinite(speed) || !std::isfinite(angular_diffusion))
    throw InvalidParameter("physical parameters must be finite");
  if (spatial_diffusion <= 0.0) throw InvalidParameter("D_E must be positive");
  if (angular_diffusion < 0.0) throw InvalidParameter("D_O must be nonnegative");
  if (speed < 0.0) throw InvalidParameter("v_0 must be nonnegative");
}

void DimensionlessParams::validate() const {
  if (!(phi >= 0.0 && phi <= 1.0)) throw InvalidParameter("phi must lie in [0,1], got " + std::to_string(phi));
  if (!(peclet >= 0.0) || !std::isfinite(peclet)) throw InvalidParameter("Pe must be nonnegative and finite");
  if (!(ell > 0.0) || !std::isfinite(ell)) throw InvalidParameter("ell must be positive and finite");
}

PhysicalParams to_physical(const DimensionlessParams& d, double spatial_diffusion) {
  d.validate();
  if (!(spatial_diffusion > 0.0) || !std::isfinite(spatial_diffusion))
    throw InvalidParameter("D_E must be positive and finite");
  PhysicalParams p;
  p.spatial_diffusion = spatial_diffusion;
  p.angular_diffusion = spatial_diffusion / (d.ell * d.ell);
  p.speed = d.peclet * spatial_diffusion / d.ell;
  return p;
}

DimensionlessParams to_dimensionless(const PhysicalParams& p, double phi) {
  p.validate();
  if (p.angular_diffusion == 0.0) throw InvalidParameter("ell and Pe are undefined for D_O = 0");
  if (!(phi >= 0.0 && phi <= 1.0)) throw InvalidParameter("phi must lie in [0,1]");
  DimensionlessParams d;
  d.phi = phi;
  d.ell = std::sqrt(p.spatial_diffusion / p.angular_diffusion);
  d.peclet = p.speed / std::sqrt(p.spatial_diffusion * p.angular_diffusion);
  return d;
}

}  // namespace alg
